"""Declarative spec documents for the CLI: a single JSON-compatible object
with "algebra" or "diagram", optional named "matrices", and a "command"
section.  Rationals are strings "p/q", polynomial elements are coefficient
arrays, propagation kernels are sparse [point, point, value] triples.
Claimed levels are re-derived and rejected on mismatch."""

import json

from .algebras import (
    IDENTITY,
    INCLUSION,
    QUOTIENT,
    RESTRICTION,
    FilteredHom,
    LocalizedAlgebra,
    PropagationSpace,
)
from .matrices import FilteredMatrix, InvertibleCert
from .mv import MVDiagram
from .scalars import Poly, parse_rational


class SpecError(Exception):
    """Schema violation; the CLI maps this to exit code 2."""


ALGEBRA_KEYS = {"kind", "max_level", "points", "dist", "radius_base", "diagonal", "modulus"}
HOM_KEYS = {"type", "source", "target"}
MATRIX_KEYS = {"algebra", "size", "entries", "inverse", "level"}
COMMAND_KEYS = {
    "name", "seed", "samples", "max_size", "u", "lift_a", "lift_b", "m",
    "perturb_a", "perturb_b", "corrupt_witness",
}
TOP_KEYS = {"algebra", "diagram", "matrices", "command"}


def _require(cond, message):
    if not cond:
        raise SpecError(message)


def _check_keys(obj, allowed, where):
    _require(isinstance(obj, dict), f"{where} must be an object")
    unknown = set(obj) - allowed
    _require(not unknown, f"{where} has unknown keys {sorted(unknown)}")


def parse_algebra(obj, where="algebra"):
    _check_keys(obj, ALGEBRA_KEYS, where)
    kind = obj.get("kind")
    max_level = obj.get("max_level", 16)
    _require(isinstance(max_level, int) and max_level >= 1, f"{where}: bad max_level")
    try:
        if kind == "trivial":
            return LocalizedAlgebra.trivial(max_level=max_level)
        if kind == "propagation":
            points = obj.get("points")
            dist = obj.get("dist")
            _require(isinstance(points, list) and points, f"{where}: points required")
            _require(isinstance(dist, list), f"{where}: dist required")
            rows = [[parse_rational(v) for v in row] for row in dist]
            space = PropagationSpace(points, rows, parse_rational(obj.get("radius_base", "1")))
            return LocalizedAlgebra.propagation(
                space, diagonal=bool(obj.get("diagonal", False)), max_level=max_level
            )
        if kind == "quotient-pullback-leg":
            modulus = obj.get("modulus")
            if modulus is None:
                return LocalizedAlgebra.poly_ring(max_level=max_level)
            _require(isinstance(modulus, list), f"{where}: modulus must be a coefficient array")
            return LocalizedAlgebra.quotient_ring(
                Poly([parse_rational(c) for c in modulus]), max_level=max_level
            )
    except (ValueError, TypeError) as exc:
        raise SpecError(f"{where}: {exc}") from exc
    raise SpecError(f"{where}: unknown kind {kind!r}")


def parse_diagram(obj, where="diagram"):
    _check_keys(
        obj, {"lambda1", "lambda2", "lambda_prime", "j1", "j2"}, where
    )
    algebras = {}
    for role in ("lambda1", "lambda2", "lambda_prime"):
        _require(role in obj, f"{where}: {role} required")
        algebras[role] = parse_algebra(obj[role], f"{where}.{role}")
    homs = {}
    for leg, src in (("j1", "lambda1"), ("j2", "lambda2")):
        spec = obj.get(leg)
        _check_keys(spec or {}, HOM_KEYS, f"{where}.{leg}")
        _require(spec and "type" in spec, f"{where}.{leg}: type required")
        kind = {
            "identity": IDENTITY,
            "quotient": QUOTIENT,
            "restriction": RESTRICTION,
            "scalar-inclusion": INCLUSION,
        }.get(spec["type"])
        _require(kind is not None, f"{where}.{leg}: unknown type {spec['type']!r}")
        try:
            homs[leg] = FilteredHom(kind, algebras[src], algebras["lambda_prime"])
        except ValueError as exc:
            raise SpecError(f"{where}.{leg}: {exc}") from exc
    try:
        return MVDiagram(
            algebras["lambda1"], algebras["lambda2"], algebras["lambda_prime"],
            homs["j1"], homs["j2"],
        )
    except ValueError as exc:
        raise SpecError(f"{where}: {exc}") from exc


def parse_matrix(obj, algebra, where="matrix"):
    _check_keys(obj, MATRIX_KEYS, where)
    size = obj.get("size")
    entries = obj.get("entries")
    _require(isinstance(size, int) and size >= 1, f"{where}: bad size")
    _require(
        isinstance(entries, list) and len(entries) == size,
        f"{where}: entries must be a {size}x{size} grid",
    )
    rows = []
    for r, row in enumerate(entries):
        _require(isinstance(row, list) and len(row) == size, f"{where}: row {r} malformed")
        try:
            rows.append(tuple(algebra.parse_payload(e) for e in row))
        except (ValueError, TypeError) as exc:
            raise SpecError(f"{where}: row {r}: {exc}") from exc
    mat = FilteredMatrix(algebra, rows)
    claimed = obj.get("level")
    if claimed is not None:
        _require(
            claimed == mat.level,
            f"{where}: claimed level {claimed} but recomputed {mat.level}",
        )
    inverse = obj.get("inverse")
    if inverse is not None:
        inv = parse_matrix(
            {"size": size, "entries": inverse}, algebra, f"{where}.inverse"
        )
        try:
            return InvertibleCert(mat, inv, check=True)
        except ValueError as exc:
            raise SpecError(f"{where}: inverse does not verify: {exc}") from exc
    return mat


class SpecDocument:
    __slots__ = ("algebra", "diagram", "matrices", "command", "raw")

    def __init__(self, raw):
        _check_keys(raw, TOP_KEYS, "document")
        self.raw = raw
        self.algebra = None
        self.diagram = None
        if "algebra" in raw:
            self.algebra = parse_algebra(raw["algebra"])
        if "diagram" in raw:
            self.diagram = parse_diagram(raw["diagram"])
        command = raw.get("command", {})
        _check_keys(command, COMMAND_KEYS, "command")
        self.command = command
        self.matrices = {}
        for name, spec in (raw.get("matrices") or {}).items():
            _require(isinstance(spec, dict), f"matrix {name} must be an object")
            role = spec.get("algebra", "algebra")
            self.matrices[name] = parse_matrix(
                spec, self._resolve_algebra(role, name), f"matrix {name}"
            )

    def _resolve_algebra(self, role, name):
        if role == "algebra":
            _require(self.algebra is not None, f"matrix {name}: no algebra section")
            return self.algebra
        _require(self.diagram is not None, f"matrix {name}: no diagram section")
        try:
            return {
                "lambda1": self.diagram.lambda1,
                "lambda2": self.diagram.lambda2,
                "lambda_prime": self.diagram.lambda_prime,
            }[role]
        except KeyError:
            raise SpecError(f"matrix {name}: unknown algebra role {role!r}") from None

    def matrix(self, name, want_cert=False):
        _require(name in self.matrices, f"matrix {name!r} not defined")
        m = self.matrices[name]
        if want_cert:
            _require(
                isinstance(m, InvertibleCert),
                f"matrix {name!r} needs an explicit inverse",
            )
        return m

    @classmethod
    def from_path(cls, path):
        try:
            with open(path, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise SpecError(f"cannot read spec: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise SpecError(f"spec is not valid JSON: {exc}") from exc
        return cls(raw)
