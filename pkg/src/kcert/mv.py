"""Pullback diagrams, double matrices, and constructive gluing.

The pullback ring is never materialized: a double matrix is a pair over the
two legs whose images in the overlap ring agree exactly, validated on every
construction.  Gluing follows the lift-through-sections recipe: the
transition invertible u becomes diag(u, u^{-1}), which factors into three
elementary block matrices and a rotation; each elementary factor lifts
entrywise through the surjective leg to an invertible elementary matrix, so
the product lifts invertibly with an explicit inverse.
"""

from collections import namedtuple

from .matrices import (
    CertificateFailure,
    FilteredMatrix,
    IdempotentCert,
    InvertibleCert,
    MatrixError,
    apply_hom_matrix,
    block2,
    block_swap_cert,
    involution_cert,
    o_blocks,
    o_map,
    permutation_cert,
    section_matrix,
)
from .scalars import rat


class DoubleMismatch(CertificateFailure):
    """The two legs disagree in the overlap ring."""


class MVDiagram:
    """Two legs over an overlap ring; at least one leg is surjective and
    carries a section, which is what every lifting argument uses."""

    __slots__ = ("lambda1", "lambda2", "lambda_prime", "j1", "j2")

    def __init__(self, lambda1, lambda2, lambda_prime, j1, j2):
        if j1.source != lambda1 or j1.target != lambda_prime:
            raise ValueError("j1 must map lambda1 onto the overlap ring")
        if j2.source != lambda2 or j2.target != lambda_prime:
            raise ValueError("j2 must map lambda2 onto the overlap ring")
        if not (j1.surjective or j2.surjective):
            raise ValueError("at least one leg must be surjective")
        self.lambda1 = lambda1
        self.lambda2 = lambda2
        self.lambda_prime = lambda_prime
        self.j1 = j1
        self.j2 = j2

    @property
    def same_legs(self):
        """True when the two legs coincide (carrier and map), the shape the
        kernel-recovery recipes assume."""
        return self.lambda1 == self.lambda2 and self.j1 == self.j2

    def describe(self):
        return {
            "lambda1": self.lambda1.describe(),
            "lambda2": self.lambda2.describe(),
            "lambda_prime": self.lambda_prime.describe(),
            "j1": self.j1.describe(),
            "j2": self.j2.describe(),
        }

    def __repr__(self):
        return f"MVDiagram({self.lambda1.kind}, {self.lambda2.kind} => {self.lambda_prime.kind})"


class DoubleMatrix:
    """A pair (m1, m2) with j1*(m1) = j2*(m2) exactly."""

    __slots__ = ("diagram", "m1", "m2")

    def __init__(self, diagram, m1, m2, check=True):
        if m1.algebra != diagram.lambda1 or m2.algebra != diagram.lambda2:
            raise MatrixError("double matrix legs over the wrong algebras")
        if m1.n != m2.n:
            raise MatrixError("double matrix legs must share the size")
        self.diagram = diagram
        self.m1 = m1
        self.m2 = m2
        if check:
            self.verify()

    def verify(self):
        left = apply_hom_matrix(self.diagram.j1, self.m1)
        right = apply_hom_matrix(self.diagram.j2, self.m2)
        bad = left.first_mismatch(right)
        if bad is not None:
            raise DoubleMismatch(
                f"legs disagree in the overlap ring at {bad[0]}", bad[0], bad[1]
            )
        return self

    @property
    def n(self):
        return self.m1.n

    @property
    def level(self):
        return min(self.m1.level, self.m2.level)

    @classmethod
    def scalar_diag(cls, diagram, value, n):
        return cls(
            diagram,
            FilteredMatrix.scalar_diag(diagram.lambda1, value, n),
            FilteredMatrix.scalar_diag(diagram.lambda2, value, n),
            check=False,
        )

    @classmethod
    def diag_bits(cls, diagram, bits):
        return cls(
            diagram,
            FilteredMatrix.diag_bits(diagram.lambda1, bits),
            FilteredMatrix.diag_bits(diagram.lambda2, bits),
            check=False,
        )

    @classmethod
    def identity(cls, diagram, n):
        return cls.scalar_diag(diagram, 1, n)

    def __add__(self, other):
        self._same(other)
        return DoubleMatrix(self.diagram, self.m1 + other.m1, self.m2 + other.m2, check=False)

    def __sub__(self, other):
        self._same(other)
        return DoubleMatrix(self.diagram, self.m1 - other.m1, self.m2 - other.m2, check=False)

    def __neg__(self):
        return DoubleMatrix(self.diagram, -self.m1, -self.m2, check=False)

    def __matmul__(self, other):
        self._same(other)
        return DoubleMatrix(self.diagram, self.m1 @ other.m1, self.m2 @ other.m2, check=False)

    def _same(self, other):
        if not isinstance(other, DoubleMatrix) or other.diagram is not self.diagram:
            if not isinstance(other, DoubleMatrix) or other.diagram.describe() != self.diagram.describe():
                raise MatrixError("double matrices over different diagrams")

    def direct_sum(self, other):
        self._same(other)
        return DoubleMatrix(
            self.diagram, self.m1.direct_sum(other.m1), self.m2.direct_sum(other.m2), check=False
        )

    def pad(self, k, fill=0):
        if k == 0:
            return self
        return DoubleMatrix(
            self.diagram, self.m1.pad(k, fill), self.m2.pad(k, fill), check=False
        )

    def first_mismatch(self, other):
        bad = self.m1.first_mismatch(other.m1)
        if bad is not None:
            return ("leg1",) + bad
        bad = self.m2.first_mismatch(other.m2)
        if bad is not None:
            return ("leg2",) + bad
        return None

    def __eq__(self, other):
        return (
            isinstance(other, DoubleMatrix)
            and self.m1 == other.m1
            and self.m2 == other.m2
        )

    def __hash__(self):
        return hash((self.m1, self.m2))

    def __repr__(self):
        return f"DoubleMatrix(n={self.n}, level={self.level})"


def make_double(m1, m2, diagram):
    """Validated double matrix; reports the first mismatched entry."""
    return DoubleMatrix(diagram, m1, m2, check=True)


class DoubleIdempotent:
    """Double matrix whose legs both certify idempotent."""

    __slots__ = ("dm",)

    def __init__(self, dm, check=True):
        self.dm = dm
        if check:
            self.verify()

    def verify(self):
        self.dm.verify()
        IdempotentCert(self.dm.m1, check=True)
        IdempotentCert(self.dm.m2, check=True)
        return self

    @property
    def n(self):
        return self.dm.n

    @property
    def level(self):
        return self.dm.level

    def complement(self):
        ident = DoubleMatrix.identity(self.dm.diagram, self.n)
        return DoubleIdempotent(ident - self.dm, check=False)

    def direct_sum(self, other):
        return DoubleIdempotent(self.dm.direct_sum(other.dm), check=False)

    def pad(self, k):
        return DoubleIdempotent(self.dm.pad(k, fill=0), check=False) if k else self

    def __eq__(self, other):
        return isinstance(other, DoubleIdempotent) and self.dm == other.dm

    def __repr__(self):
        return f"DoubleIdempotent(n={self.n}, level={self.level})"


class DoubleInvertible:
    """Pair of invertible certificates whose forward and inverse parts are
    both valid double matrices."""

    __slots__ = ("dm", "dm_inv")

    def __init__(self, dm, dm_inv, check=True):
        self.dm = dm
        self.dm_inv = dm_inv
        if check:
            self.verify()

    def verify(self):
        self.dm.verify()
        self.dm_inv.verify()
        InvertibleCert(self.dm.m1, self.dm_inv.m1, check=True)
        InvertibleCert(self.dm.m2, self.dm_inv.m2, check=True)
        return self

    @classmethod
    def from_certs(cls, diagram, cert1, cert2, check=True):
        return cls(
            DoubleMatrix(diagram, cert1.m, cert2.m, check=check),
            DoubleMatrix(diagram, cert1.m_inv, cert2.m_inv, check=check),
            check=False,
        )

    @property
    def n(self):
        return self.dm.n

    @property
    def level(self):
        return min(self.dm.level, self.dm_inv.level)

    @property
    def leg1(self):
        return InvertibleCert(self.dm.m1, self.dm_inv.m1, check=False)

    @property
    def leg2(self):
        return InvertibleCert(self.dm.m2, self.dm_inv.m2, check=False)

    def inverse(self):
        return DoubleInvertible(self.dm_inv, self.dm, check=False)

    def compose(self, other):
        return DoubleInvertible(self.dm @ other.dm, other.dm_inv @ self.dm_inv, check=False)

    def direct_sum(self, other):
        return DoubleInvertible(
            self.dm.direct_sum(other.dm), self.dm_inv.direct_sum(other.dm_inv), check=False
        )

    def pad(self, k):
        if k == 0:
            return self
        return DoubleInvertible(self.dm.pad(k, fill=1), self.dm_inv.pad(k, fill=1), check=False)

    def conjugate_idempotent(self, p):
        return DoubleIdempotent(self.dm @ p.dm @ self.dm_inv, check=False)

    def __repr__(self):
        return f"DoubleInvertible(n={self.n}, level={self.level})"


def i1_star(dm):
    return dm.m1


def i2_star(dm):
    return dm.m2


def lift_via_whitehead(u, leg):
    """Invertible lift of diag(u, u^{-1}) through a surjective leg: the four
    factors lift entrywise by the section, each staying exactly invertible,
    and the rotation lifts as it is.  Returns a certificate over the leg's
    source whose image is exactly o_map(u)."""
    if not leg.surjective:
        raise ValueError("lifting requires a surjective leg")
    if u.algebra != leg.target:
        raise MatrixError("transition matrix must live over the overlap ring")
    src = leg.source
    n = u.n
    ident = FilteredMatrix.identity(src, n)
    zero = FilteredMatrix.zeros(src, n)
    a = section_matrix(leg, u.m)
    b = section_matrix(leg, u.m_inv)
    f1 = block2(ident, a, zero, ident)
    f2 = block2(ident, zero, -b, ident)
    f4 = block2(zero, -ident, ident, zero)
    fwd = f1 @ f2 @ f1 @ f4
    f1_inv = block2(ident, -a, zero, ident)
    f2_inv = block2(ident, zero, b, ident)
    f4_inv = block2(zero, ident, -ident, zero)
    bwd = f4_inv @ f1_inv @ f2_inv @ f1_inv
    lifted = InvertibleCert(fwd, bwd, check=False)
    target = o_map(u)
    bad = apply_hom_matrix(leg, fwd).first_mismatch(target.m)
    if bad is None:
        bad = apply_hom_matrix(leg, bwd).first_mismatch(target.m_inv)
    if bad is not None:
        raise CertificateFailure(f"lift image mismatch at {bad[0]}", bad[0], bad[1])
    return lifted


GluedIdempotent = namedtuple(
    "GluedIdempotent", ["double", "p1", "p2", "u", "u_tilde"]
)


def _check_conjugation_pre(diagram, mat1, mat2, u, eq_tag):
    left = apply_hom_matrix(diagram.j1, mat1)
    right = u.m @ apply_hom_matrix(diagram.j2, mat2) @ u.m_inv
    bad = left.first_mismatch(right)
    if bad is not None:
        raise CertificateFailure(
            f"{eq_tag}: images are not conjugate by u at {bad[0]}", bad[0], bad[1]
        )


def glue_idempotents(p1, p2, u, diagram):
    """Given idempotents over the two legs whose overlap images are
    conjugate by u, produce the size-doubled double idempotent whose first
    leg is p1 + 0 and whose second leg is the recorded conjugate of
    p2 + 0 by the lifted diag(u, u^{-1})."""
    if p1.algebra != diagram.lambda1 or p2.algebra != diagram.lambda2:
        raise MatrixError("idempotents over the wrong legs")
    if p1.n != p2.n or u.n != p1.n:
        raise MatrixError("sizes must agree")
    if not diagram.j2.surjective:
        raise ValueError("gluing lifts through j2, which must be surjective")
    _check_conjugation_pre(diagram, p1.p, p2.p, u, "idempotent gluing")
    n = p1.n
    u_tilde = lift_via_whitehead(u, diagram.j2)
    leg1 = p1.p.pad(n, fill=0)
    p2_stab = p2.p.pad(n, fill=0)
    leg2 = u_tilde.m @ p2_stab @ u_tilde.m_inv
    double = DoubleIdempotent(make_double(leg1, leg2, diagram))
    return GluedIdempotent(double, p1, p2, u, u_tilde)


def glue_with_lifted_transition(p1, p2, u_tilde, diagram):
    """Size-preserving gluing available when the transition invertible
    already lifts over the second leg."""
    if u_tilde.algebra != diagram.lambda2:
        raise MatrixError("lift must live over the second leg")
    u = InvertibleCert(
        apply_hom_matrix(diagram.j2, u_tilde.m),
        apply_hom_matrix(diagram.j2, u_tilde.m_inv),
        check=False,
    )
    _check_conjugation_pre(diagram, p1.p, p2.p, u, "lifted idempotent gluing")
    leg2 = u_tilde.m @ p2.p @ u_tilde.m_inv
    return DoubleIdempotent(make_double(p1.p, leg2, diagram))


def normalize_difference(p1, p2):
    """Rewrite [p1] - [p2] as [p1 + (1 - p2)] - [1_n]: returns the combined
    idempotent, the rank n of the subtracted identity, and the invertible
    that conjugates the scalar diag(0_n, 1_n) onto p2 + (1 - p2)."""
    if p1.algebra != p2.algebra:
        raise MatrixError("algebra mismatch")
    comp = p2.complement()
    p_prime = IdempotentCert(p1.p.direct_sum(comp.p), check=True)
    w = involution_cert(p2)
    swap = block_swap_cert(p2.algebra, p2.n)
    trivializer = w.compose(swap)
    return p_prime, p2.n, trivializer


def k0_common_form(d1, d2):
    """Bring two formal differences (plus, minus) over the two legs to the
    common shape ([Q] - [1_N]) with equal sizes and equal N."""
    (plus1, minus1), (plus2, minus2) = d1, d2
    q1, n1, t1 = normalize_difference(plus1, minus1)
    q2, n2, t2 = normalize_difference(plus2, minus2)
    q1 = IdempotentCert(q1.p.pad(n2, fill=1), check=False)
    q2 = IdempotentCert(q2.p.pad(n1, fill=1), check=False)
    big = max(q1.n, q2.n)
    q1 = q1.pad(big - q1.n)
    q2 = q2.pad(big - q2.n)
    return q1, q2, n1 + n2, (t1, t2)


def glue_k0_classes(d1, d2, u, diagram):
    """Glue two formal K0 differences: normalize both to [Q_i] - [1_N], glue
    the Q_i along u, and return the glued class as ([p10], [1_N])."""
    q1, q2, n_minus, _ = k0_common_form(d1, d2)
    if u.n != q1.n:
        raise MatrixError(
            f"conjugator size {u.n} does not match the common form size {q1.n}"
        )
    glued = glue_idempotents(q1, q2, u, diagram)
    minus = DoubleIdempotent(
        DoubleMatrix.diag_bits(diagram, (1,) * n_minus), check=False
    )
    return glued, minus, n_minus


def glue_invertibles(s1, s2, u, diagram):
    """Glue invertibles along a transition: double invertible with first leg
    s1 + 1 and second
    leg the recorded conjugate of s2 + 1 by the lifted diag(u, u^{-1})."""
    if s1.algebra != diagram.lambda1 or s2.algebra != diagram.lambda2:
        raise MatrixError("invertibles over the wrong legs")
    if s1.n != s2.n or u.n != s1.n:
        raise MatrixError("sizes must agree")
    if not diagram.j2.surjective:
        raise ValueError("gluing lifts through j2, which must be surjective")
    _check_conjugation_pre(diagram, s1.m, s2.m, u, "invertible gluing")
    n = s1.n
    u_tilde = lift_via_whitehead(u, diagram.j2)
    leg1 = s1.pad(n)
    s2_stab = s2.pad(n)
    leg2 = InvertibleCert(
        u_tilde.m @ s2_stab.m @ u_tilde.m_inv,
        u_tilde.m @ s2_stab.m_inv @ u_tilde.m_inv,
        check=False,
    )
    return DoubleInvertible.from_certs(diagram, leg1, leg2, check=True)


OLift = namedtuple("OLift", ["u_tilde", "xi_tilde", "forward", "perm"])


def lift_o_element(xi, leg):
    """Lift recipe for O-shaped elements: from xi = diag(alpha, alpha^{-1})
    build xi~ by the four-factor formula with section-lifted entries, then
    U~ = diag(xi~, xi~^{-1}), whose forward image diag(xi, xi^{-1}) is
    permutation-conjugate to xi + xi."""
    if not leg.surjective:
        raise ValueError("lifting requires a surjective leg")
    alpha = o_blocks(xi)
    xi_tilde = lift_via_whitehead(alpha, leg)
    u_tilde = o_map(xi_tilde)
    forward = apply_hom_matrix(leg, u_tilde.m)
    expected = xi.m.direct_sum(xi.m_inv)
    bad = forward.first_mismatch(expected)
    if bad is not None:
        raise CertificateFailure(f"O-lift image mismatch at {bad[0]}", bad[0], bad[1])
    n = alpha.n
    blocks = (0, 1, 3, 2)
    perm = []
    for b in blocks:
        perm.extend(range(b * n, (b + 1) * n))
    p = permutation_cert(xi.algebra, tuple(perm))
    double_xi = xi.m.direct_sum(xi.m)
    bad = (p.m @ double_xi @ p.m_inv).first_mismatch(forward)
    if bad is not None:
        raise CertificateFailure(
            f"O-lift permutation conjugacy fails at {bad[0]}", bad[0], bad[1]
        )
    return OLift(u_tilde, xi_tilde, forward, p)


K1GlueWitness = namedtuple("K1GlueWitness", ["xi1", "xi2", "u"])

GluedK1 = namedtuple("GluedK1", ["terms", "details"])


def glue_k1_classes(u1, u2, witness, diagram, coefficient=1):
    """Glue K1 representatives.  With empty xi's this is plain invertible gluing at
    coefficient 1.  With O-shaped corrections, both sides are doubled, the
    corrections lift through the legs by the O-lift recipe, and the glued
    representative carries coefficient 1/2 in the dyadic ledger."""
    coeff = rat(coefficient)
    xi1, xi2, u = witness
    if xi1 is None and xi2 is None:
        _check_conjugation_pre(diagram, u1.m, u2.m, u, "K1 gluing")
        glued = glue_invertibles(u1, u2, u, diagram)
        return GluedK1(terms=((glued, coeff),), details=None)
    if not (diagram.j1.surjective and diagram.j2.surjective):
        raise ValueError("the O-lift path needs both legs surjective")
    if xi1 is None or xi2 is None or xi1.n != xi2.n:
        raise CertificateFailure("witness needs O-shaped corrections of one size")
    side1 = apply_hom_matrix(diagram.j1, u1.m).direct_sum(xi1.m)
    side2 = apply_hom_matrix(diagram.j2, u2.m).direct_sum(xi2.m)
    bad = side1.first_mismatch(u.m @ side2 @ u.m_inv)
    if bad is not None:
        raise CertificateFailure(
            f"K1 witness equation fails at {bad[0]}", bad[0], bad[1]
        )
    lift1 = lift_o_element(xi1, diagram.j1)
    lift2 = lift_o_element(xi2, diagram.j2)
    u1p = u1.direct_sum(u1).direct_sum(lift1.u_tilde)
    u2p = u2.direct_sum(u2).direct_sum(lift2.u_tilde)
    n = u1.n
    k2 = xi1.n
    # index permutation sending X + X (X = j(u) + xi) to j(u) + j(u) + xi + xi
    perm = (
        tuple(range(0, n))
        + tuple(range(n + k2, 2 * n + k2))
        + tuple(range(n, n + k2))
        + tuple(range(2 * n + k2, 2 * n + 2 * k2))
    )
    rho = permutation_cert(diagram.lambda_prime, perm)
    ident_2n = InvertibleCert.identity(diagram.lambda_prime, 2 * n)
    sigma1 = ident_2n.direct_sum(lift1.perm)
    sigma2 = ident_2n.direct_sum(lift2.perm)
    uu = u.direct_sum(u)
    w = sigma1.compose(rho).compose(uu).compose(rho.inverse()).compose(sigma2.inverse())
    bad = apply_hom_matrix(diagram.j1, u1p.m).first_mismatch(
        w.m @ apply_hom_matrix(diagram.j2, u2p.m) @ w.m_inv
    )
    if bad is not None:
        raise CertificateFailure(
            f"doubled K1 witness equation fails at {bad[0]}", bad[0], bad[1]
        )
    glued = glue_invertibles(u1p, u2p, w, diagram)
    half = coeff / rat(2)
    return GluedK1(terms=((glued, half),), details=(lift1, lift2, w))
