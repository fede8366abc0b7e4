"""Exact-arithmetic certificates for gluing idempotents and invertibles over
filtered algebras, the connecting homomorphism, and six-term exactness
witnesses, all verified by recomputation rather than trusted."""

from .scalars import COMPILED, Rat, rat

__all__ = ["COMPILED", "Rat", "rat"]
__version__ = "0.1.0"
