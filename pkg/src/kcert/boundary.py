"""The connecting map from invertibles over the overlap ring to formal
differences of double idempotents, in all three forms, with the explicit
well-definedness conjugators.

Given lifts A, B of U, U^{-1} through the first leg (not necessarily
invertible), the defect matrices S0 = 1 - BA and S1 = 1 - AB die in the
overlap ring, the block matrix L = [[S0, -(1+S0)B], [A, S1]] is exactly
invertible with inverse [[S0, (1+S0)B], [-A, S1]], and P = L e1 L^{-1} is
an idempotent whose closed form [[S0^2, S0(1+S0)B], [S1 A, 1 - S1^2]]
follows from the intertwining laws S1 A = A S0 and A(1+S0)B = 1 - S1^2.
Pairing P with the scalar block e2 over the second leg gives the double
idempotent whose class, minus the trivial class, is the boundary.
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
    section_matrix,
)
from .mv import DoubleIdempotent, DoubleMatrix, glue_idempotents


BoundaryOutput = namedtuple(
    "BoundaryOutput",
    ["u", "m", "n", "lift_a", "lift_b", "s0", "s1", "l", "p", "p_double", "e2", "minus"],
)


def e_block(algebra, m, n):
    """The scalar idempotent diag(0_m, 1_n)."""
    return FilteredMatrix.diag_bits(algebra, (0,) * m + (1,) * n)


def default_lifts(diagram, u):
    """Section lifts of U and U^{-1} through the first leg."""
    if not diagram.j1.surjective:
        raise ValueError("the boundary lifts through j1, which must be surjective")
    return section_matrix(diagram.j1, u.m), section_matrix(diagram.j1, u.m_inv)


class BoundaryInput:
    """A transition invertible over the overlap ring together with lifts of
    it and its inverse through the first leg, and the split m + n of the
    size for the extended (stabilized) form."""

    __slots__ = ("diagram", "u", "m", "n", "lift_a", "lift_b")

    def __init__(self, diagram, u, lift_a=None, lift_b=None, m=0):
        if u.algebra != diagram.lambda_prime:
            raise MatrixError("U must live over the overlap ring")
        if lift_a is None or lift_b is None:
            a, b = default_lifts(diagram, u)
            lift_a = lift_a if lift_a is not None else a
            lift_b = lift_b if lift_b is not None else b
        if lift_a.algebra != diagram.lambda1 or lift_b.algebra != diagram.lambda1:
            raise MatrixError("lifts must live over the first leg")
        if lift_a.n != u.n or lift_b.n != u.n:
            raise MatrixError("lift sizes must match U")
        if not (0 <= m <= u.n):
            raise MatrixError("block split must satisfy 0 <= m <= size")
        bad = apply_hom_matrix(diagram.j1, lift_a).first_mismatch(u.m)
        if bad is not None:
            raise CertificateFailure(f"lift A has the wrong image at {bad[0]}", *bad)
        bad = apply_hom_matrix(diagram.j1, lift_b).first_mismatch(u.m_inv)
        if bad is not None:
            raise CertificateFailure(f"lift B has the wrong image at {bad[0]}", *bad)
        if m > 0:
            e = e_block(diagram.lambda_prime, m, u.n - m)
            bad = (u.m @ e).first_mismatch(e @ u.m)
            if bad is not None:
                raise CertificateFailure(
                    f"U must commute with the stabilization block, fails at {bad[0]}",
                    *bad,
                )
        self.diagram = diagram
        self.u = u
        self.m = m
        self.n = u.n - m
        self.lift_a = lift_a
        self.lift_b = lift_b


def _build_l(algebra, a, b, s0, s1):
    l_fwd = block2(s0, -(s0.plus_scalar(1) @ b), a, s1)
    l_bwd = block2(s0, s0.plus_scalar(1) @ b, -a, s1)
    return InvertibleCert(l_fwd, l_bwd, check=True)


def _boundary_core(inp):
    diagram = inp.diagram
    a, b = inp.lift_a, inp.lift_b
    size = inp.u.n
    ident = FilteredMatrix.identity(diagram.lambda1, size)
    s0 = ident - b @ a
    s1 = ident - a @ b
    for tag, s in (("S0", s0), ("S1", s1)):
        img = apply_hom_matrix(diagram.j1, s)
        if not img.is_zero():
            bad = img.first_mismatch(FilteredMatrix.zeros(diagram.lambda_prime, size))
            raise CertificateFailure(f"{tag} does not die in the overlap ring", *bad)
    l = _build_l(diagram.lambda1, a, b, s0, s1)
    e1_top = e_block(diagram.lambda1, inp.m, inp.n)
    zero = FilteredMatrix.zeros(diagram.lambda1, size)
    e1 = block2(e1_top, zero, zero, zero)
    p_mat = l.m @ e1 @ l.m_inv
    p = IdempotentCert(p_mat, check=True)
    e2_leg2 = block2(
        FilteredMatrix.zeros(diagram.lambda2, size),
        FilteredMatrix.zeros(diagram.lambda2, size),
        FilteredMatrix.zeros(diagram.lambda2, size),
        e_block(diagram.lambda2, inp.m, inp.n),
    )
    p_double = DoubleIdempotent(DoubleMatrix(diagram, p_mat, e2_leg2, check=True))
    minus = DoubleIdempotent(
        DoubleMatrix(
            diagram,
            block2(zero, zero, zero, e_block(diagram.lambda1, inp.m, inp.n)),
            e2_leg2,
            check=False,
        ),
        check=False,
    )
    return BoundaryOutput(
        u=inp.u,
        m=inp.m,
        n=inp.n,
        lift_a=a,
        lift_b=b,
        s0=s0,
        s1=s1,
        l=l,
        p=p,
        p_double=p_double,
        e2=e2_leg2,
        minus=minus,
    )


def closed_form_p(inp, s0, s1):
    """The displayed closed form of L e1 L^{-1}; for the extended form the
    bottom-right block is A e (1 + S0) B, consistent with the expansion."""
    a, b = inp.lift_a, inp.lift_b
    e = e_block(inp.diagram.lambda1, inp.m, inp.n)
    one_plus_s0_b = s0.plus_scalar(1) @ b
    return block2(
        s0 @ e @ s0,
        s0 @ e @ one_plus_s0_b,
        a @ e @ s0,
        a @ e @ one_plus_s0_b,
    )


def boundary_second_form(inp):
    """m = 0 form: P = [[S0^2, S0(1+S0)B], [S1 A, 1 - S1^2]] paired with the
    constant e2 block over the second leg."""
    if inp.m != 0:
        raise MatrixError("second form requires m = 0")
    out = _boundary_core(inp)
    size = inp.u.n
    expect = block2(
        out.s0 @ out.s0,
        out.s0 @ (out.s0.plus_scalar(1) @ inp.lift_b),
        out.s1 @ inp.lift_a,
        FilteredMatrix.identity(inp.diagram.lambda1, size) - out.s1 @ out.s1,
    )
    bad = out.p.p.first_mismatch(expect)
    if bad is not None:
        raise CertificateFailure(
            f"closed form disagrees with L e1 L^-1 at {bad[0]}", *bad
        )
    return out


def boundary_extended_form(inp):
    """Extended form for any m >= 0; reduces exactly to the second form when
    m = 0.  Requires U to commute with diag(0_m, 1_n)."""
    out = _boundary_core(inp)
    bad = out.p.p.first_mismatch(closed_form_p(inp, out.s0, out.s1))
    if bad is not None:
        raise CertificateFailure(
            f"extended closed form disagrees with L e1 L^-1 at {bad[0]}", *bad
        )
    return out


def boundary_first_form(diagram, u):
    """The gluing form: the double idempotent glued from (1_n, 1_n, U),
    minus the trivial class of matching rank."""
    n = u.n
    one = IdempotentCert(
        FilteredMatrix.identity(diagram.lambda1, n), check=False
    )
    one2 = IdempotentCert(
        FilteredMatrix.identity(diagram.lambda2, n), check=False
    )
    glued = glue_idempotents(one, one2, u, diagram)
    minus = DoubleIdempotent(
        DoubleMatrix.diag_bits(diagram, (1,) * n + (0,) * n), check=False
    )
    return glued, minus


def independence_conjugator_a(inp, k):
    """The explicit conjugator for replacing the lift A by A + K with K dying
    in the overlap ring: [[1 - BK, -BKB], [K, 1 + KB]]."""
    b = inp.lift_b
    bk = b @ k
    kb = k @ b
    return block2(
        bk.scale(-1).plus_scalar(1),
        -(bk @ b),
        k,
        kb.plus_scalar(1),
    )


def verify_lift_independence_a(inp, k):
    """Recompute the boundary with A + K and verify the explicit conjugator
    maps L to L~ and the double idempotent to the perturbed one, exactly."""
    diagram = inp.diagram
    img = apply_hom_matrix(diagram.j1, k)
    if not img.is_zero():
        raise CertificateFailure("perturbation K must die in the overlap ring")
    base = boundary_extended_form(inp)
    shifted = BoundaryInput(
        diagram, inp.u, lift_a=inp.lift_a + k, lift_b=inp.lift_b, m=inp.m
    )
    tilde = boundary_extended_form(shifted)
    conj = independence_conjugator_a(inp, k)
    checks = []
    bad = tilde.l.m.first_mismatch(conj @ base.l.m)
    checks.append(("L~ = conj . L", bad))
    conj_cert = InvertibleCert(conj, base.l.m @ tilde.l.m_inv, check=True)
    bad2 = tilde.p.p.first_mismatch(conj_cert.m @ base.p.p @ conj_cert.m_inv)
    checks.append(("P~ = conj P conj^-1", bad2))
    ident2 = InvertibleCert.identity(diagram.lambda2, 2 * inp.u.n)
    bad3 = tilde.p_double.dm.m2.first_mismatch(
        ident2.m @ base.p_double.dm.m2 @ ident2.m_inv
    )
    checks.append(("second leg fixed", bad3))
    failures = [(tag, bad) for tag, bad in checks if bad is not None]
    if failures:
        raise CertificateFailure(f"lift independence in A fails: {failures[0]}")
    return conj_cert, tilde


def independence_deltas(inp, h):
    """The four displayed blocks of L~~ L^{-1} for B -> B + H."""
    a, b = inp.lift_a, inp.lift_b
    ha = h @ a
    ah = a @ h
    ab = a @ b
    ba = b @ a
    d11 = ha - ha @ ha - ba @ ha
    d12 = (
        h.scale(-2)
        + h @ ab
        + ha @ h
        + ba @ h
        - ba @ (h @ ab)
        - ha @ (h @ ab)
    )
    d21 = a @ ha
    d22 = -ah + ah @ ab
    return d11, d12, d21, d22


def verify_lift_independence_b(inp, h):
    """Recompute the boundary with B + H and verify L~~ L^{-1} matches the
    displayed delta blocks and conjugates the double idempotent."""
    diagram = inp.diagram
    img = apply_hom_matrix(diagram.j1, h)
    if not img.is_zero():
        raise CertificateFailure("perturbation H must die in the overlap ring")
    base = boundary_extended_form(inp)
    shifted = BoundaryInput(
        diagram, inp.u, lift_a=inp.lift_a, lift_b=inp.lift_b + h, m=inp.m
    )
    tilde = boundary_extended_form(shifted)
    d11, d12, d21, d22 = independence_deltas(inp, h)
    expect = block2(
        d11.plus_scalar(1), d12, d21, d22.plus_scalar(1)
    )
    observed = tilde.l.m @ base.l.m_inv
    bad = observed.first_mismatch(expect)
    if bad is not None:
        raise CertificateFailure(f"delta block formula fails at {bad[0]}", *bad)
    conj_cert = InvertibleCert(observed, base.l.m @ tilde.l.m_inv, check=True)
    bad = tilde.p.p.first_mismatch(conj_cert.m @ base.p.p @ conj_cert.m_inv)
    if bad is not None:
        raise CertificateFailure(f"perturbed idempotent not conjugate at {bad[0]}", *bad)
    return conj_cert, tilde


def rotation_image(u):
    """The block rotation [[0, -U^{-1}], [U, 0]] any alternative L must hit."""
    z = FilteredMatrix.zeros(u.algebra, u.n)
    return block2(z, -u.m_inv, u.m, z)


def boundary_alt_lifting(inp, l_any):
    """Lifting freedom: any invertible lifting of the block rotation
    produces a conjugate idempotent, with conjugator L' L^{-1}."""
    diagram = inp.diagram
    base = boundary_extended_form(inp)
    bad = apply_hom_matrix(diagram.j1, l_any.m).first_mismatch(rotation_image(inp.u))
    if bad is not None:
        raise CertificateFailure(
            f"alternative L does not lift the block rotation at {bad[0]}", *bad
        )
    e1 = base.l.m_inv @ base.p.p @ base.l.m  # recover e1 = L^-1 P L exactly
    p_alt = IdempotentCert(l_any.m @ e1 @ l_any.m_inv, check=True)
    conj = l_any.compose(base.l.inverse())
    bad = p_alt.p.first_mismatch(conj.m @ base.p.p @ conj.m_inv)
    if bad is not None:
        raise CertificateFailure(f"alt-lift conjugacy fails at {bad[0]}", *bad)
    return p_alt, conj, base
