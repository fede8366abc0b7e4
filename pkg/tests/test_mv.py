import pytest

from kcert.matrices import (
    CertificateFailure,
    FilteredMatrix,
    IdempotentCert,
    InvertibleCert,
    apply_hom_matrix,
    o_map,
)
from kcert.mv import (
    DoubleMismatch,
    K1GlueWitness,
    MVDiagram,
    glue_idempotents,
    glue_invertibles,
    glue_k0_classes,
    glue_k1_classes,
    k0_common_form,
    glue_with_lifted_transition,
    lift_o_element,
    lift_via_whitehead,
    make_double,
    normalize_difference,
)
from kcert.scalars import Poly, QuotElem, rat


def _x_cert(diagram):
    x_cls = QuotElem(diagram.lambda_prime.modulus, Poly([0, 1]))
    m = FilteredMatrix(diagram.lambda_prime, ((x_cls,),))
    return InvertibleCert(m, m)


def _img_cert(hom, cert):
    return InvertibleCert(
        apply_hom_matrix(hom, cert.m), apply_hom_matrix(hom, cert.m_inv), check=False
    )


def test_make_double_examples(clutching):
    one1 = FilteredMatrix.identity(clutching.lambda1, 1)
    one2 = FilteredMatrix.identity(clutching.lambda2, 1)
    make_double(one1, one2, clutching).verify()
    x = FilteredMatrix(clutching.lambda1, ((Poly([0, 1]),),))
    make_double(x, x, clutching).verify()
    shifted = FilteredMatrix(clutching.lambda1, ((Poly([-1, 1, 1]),),))  # x + (x^2 - 1)
    make_double(x, shifted, clutching).verify()
    with pytest.raises(DoubleMismatch):
        make_double(x, one2, clutching)


def test_lift_via_whitehead(clutching, sampler):
    u = sampler.invertible(clutching.lambda_prime, 2)
    lifted = lift_via_whitehead(u, clutching.j2)
    lifted.verify()
    assert apply_hom_matrix(clutching.j2, lifted.m) == o_map(u).m


def test_glue_trivial_units(clutching):
    one1 = IdempotentCert(FilteredMatrix.identity(clutching.lambda1, 1), check=False)
    one2 = IdempotentCert(FilteredMatrix.identity(clutching.lambda2, 1), check=False)
    unit = InvertibleCert.identity(clutching.lambda_prime, 1)
    glued = glue_idempotents(one1, one2, unit, clutching)
    glued.double.verify()
    assert glued.double.dm.m1 == FilteredMatrix.diag_bits(clutching.lambda1, (1, 0))
    assert glued.double.dm.m2 == FilteredMatrix.diag_bits(clutching.lambda2, (1, 0))


def test_glue_clutching_idempotent(clutching):
    one1 = IdempotentCert(FilteredMatrix.identity(clutching.lambda1, 1), check=False)
    one2 = IdempotentCert(FilteredMatrix.identity(clutching.lambda2, 1), check=False)
    u = _x_cert(clutching)
    glued = glue_idempotents(one1, one2, u, clutching)
    glued.double.verify()
    # leg1 is the literal stabilization, leg2 the recorded conjugate
    assert glued.double.dm.m1 == one1.p.pad(1, fill=0)
    expect = glued.u_tilde.m @ one2.p.pad(1, fill=0) @ glued.u_tilde.m_inv
    assert glued.double.dm.m2 == expect
    assert glued.double.level >= max(0, min(one1.level, one2.level, u.level) - 4)


def test_glue_precondition_failure(clutching, sampler):
    p1 = IdempotentCert(FilteredMatrix.diag_bits(clutching.lambda1, (1, 0)), check=False)
    p2 = IdempotentCert(FilteredMatrix.diag_bits(clutching.lambda2, (0, 0)), check=False)
    u = InvertibleCert.identity(clutching.lambda_prime, 2)
    with pytest.raises(CertificateFailure):
        glue_idempotents(p1, p2, u, clutching)


def test_glue_conjugated_by_double_matches_normal_form(clutching, sampler):
    # conjugating the glued idempotent by a double invertible keeps both
    # legs certifying and the double constraint intact
    one1 = IdempotentCert(FilteredMatrix.identity(clutching.lambda1, 1), check=False)
    one2 = IdempotentCert(FilteredMatrix.identity(clutching.lambda2, 1), check=False)
    glued = glue_idempotents(one1, one2, _x_cert(clutching), clutching)
    w = sampler.invertible(clutching.lambda1, 2)
    from kcert.mv import DoubleInvertible

    dw = DoubleInvertible.from_certs(clutching, w, w, check=True)
    conj = dw.conjugate_idempotent(glued.double)
    conj.verify()


def test_glue_with_lifted_transition(clutching, sampler):
    # a transition that already lifts: u = j2(u~) for an invertible u~
    u_tilde = sampler.invertible(clutching.lambda2, 1)
    u = _img_cert(clutching.j2, u_tilde)
    p1_mat = u.m @ FilteredMatrix.diag_bits(clutching.lambda_prime, (1,)) @ u.m_inv
    # p1 over lambda1 must hit u j2(p2) u^-1; take p2 = 1, p1 = lift of u j(1) u^-1 = 1
    one1 = IdempotentCert(FilteredMatrix.identity(clutching.lambda1, 1), check=False)
    one2 = IdempotentCert(FilteredMatrix.identity(clutching.lambda2, 1), check=False)
    double = glue_with_lifted_transition(one1, one2, u_tilde, clutching)
    double.verify()
    assert double.n == 1  # no size doubling
    assert double.dm.m2 == u_tilde.m @ one2.p @ u_tilde.m_inv


def test_normalize_difference(trivial, sampler):
    p1 = sampler.idempotent(trivial, 2)
    ones = IdempotentCert(FilteredMatrix.identity(trivial, 2), check=False)
    p_prime, n, trivializer = normalize_difference(p1, ones)
    assert n == 2
    assert p_prime.p == p1.p.direct_sum(FilteredMatrix.zeros(trivial, 2))
    p2 = sampler.idempotent(trivial, 2)
    p_prime, n, trivializer = normalize_difference(p2, p2)
    trivializer.verify()
    scalar = FilteredMatrix.diag_bits(trivial, (0, 0, 1, 1))
    assert trivializer.m @ scalar @ trivializer.m_inv == p2.p.direct_sum(
        p2.complement().p
    )


def test_glue_k0_classes(clutching, sampler):
    c1 = sampler.invertible(clutching.lambda1, 2, factors=1)
    c2 = sampler.invertible(clutching.lambda2, 2, factors=1)
    plus1 = IdempotentCert(
        c1.m @ FilteredMatrix.diag_bits(clutching.lambda1, (1, 0)) @ c1.m_inv
    )
    minus1 = IdempotentCert(FilteredMatrix.identity(clutching.lambda1, 1), check=False)
    plus2 = IdempotentCert(
        c2.m @ FilteredMatrix.diag_bits(clutching.lambda2, (1, 0)) @ c2.m_inv
    )
    minus2 = IdempotentCert(FilteredMatrix.identity(clutching.lambda2, 1), check=False)
    q1, q2, n_minus, _ = k0_common_form((plus1, minus1), (plus2, minus2))
    pad = q1.n - 2
    v = _img_cert(clutching.j1, c1.pad(pad)).compose(
        _img_cert(clutching.j2, c2.pad(pad)).inverse()
    )
    glued, minus, n = glue_k0_classes(
        (plus1, minus1), (plus2, minus2), v, clutching
    )
    glued.double.verify()
    assert n == n_minus == 2


def test_glue_invertibles(clutching, sampler):
    s1 = sampler.invertible(clutching.lambda1, 1)
    u = _x_cert(clutching)
    # need j1(s1) = u j2(s2) u^-1; over the commutative overlap conjugation
    # is trivial, so s2 = s1 works
    glued = glue_invertibles(s1, s1, u, clutching)
    glued.verify()
    assert glued.dm.m1 == s1.pad(1).m
    assert glued.level >= max(0, min(s1.level, u.level) - 4)
    one = InvertibleCert.identity(clutching.lambda_prime, 1)
    triv = glue_invertibles(s1, s1, one, clutching)
    triv.verify()


def test_lift_o_element(clutching, sampler):
    alpha = sampler.invertible(clutching.lambda_prime, 1)
    xi = o_map(alpha)
    lifted = lift_o_element(xi, clutching.j1)
    lifted.u_tilde.verify()
    assert lifted.forward == xi.m.direct_sum(xi.m_inv)
    # permutation conjugacy to xi + xi
    double_xi = xi.m.direct_sum(xi.m)
    assert lifted.perm.m @ double_xi @ lifted.perm.m_inv == lifted.forward
    # identity input -> identity lift image
    one = InvertibleCert.identity(clutching.lambda_prime, 1)
    triv = lift_o_element(o_map(one), clutching.j1)
    assert triv.forward == FilteredMatrix.identity(clutching.lambda_prime, 4)
    with pytest.raises(CertificateFailure):
        lift_o_element(sampler.invertible(clutching.lambda_prime, 2), clutching.j1)


def test_glue_k1_plain(clutching, sampler):
    u1 = sampler.invertible(clutching.lambda1, 1)
    one = InvertibleCert.identity(clutching.lambda_prime, 1)
    out = glue_k1_classes(u1, u1, K1GlueWitness(None, None, one), clutching)
    (term, coeff), = out.terms
    assert coeff == rat(1)
    term.verify()


def test_glue_k1_half_and_quarter(clutching, sampler):
    u1 = sampler.invertible(clutching.lambda1, 1)
    xi = o_map(_x_cert(clutching))
    one = InvertibleCert.identity(clutching.lambda_prime, 3)
    out = glue_k1_classes(u1, u1, K1GlueWitness(xi, xi, one), clutching)
    (term, coeff), = out.terms
    assert coeff == rat(1, 2)
    term.verify()
    again = glue_k1_classes(
        u1, u1, K1GlueWitness(xi, xi, one), clutching, coefficient=coeff
    )
    assert again.terms[0][1] == rat(1, 4)


def test_glue_k1_witness_failure(clutching, sampler):
    u1 = sampler.invertible(clutching.lambda1, 1)
    two = InvertibleCert(
        FilteredMatrix.scalar_diag(clutching.lambda1, 2, 1),
        FilteredMatrix.scalar_diag(clutching.lambda1, rat(1, 2), 1),
        check=False,
    )
    one = InvertibleCert.identity(clutching.lambda_prime, 1)
    with pytest.raises(CertificateFailure):
        glue_k1_classes(u1, u1.compose(two), K1GlueWitness(None, None, one), clutching)


def test_cover_diagram_gluing(cover, sampler):
    # genuine two-chart cover: glue along a unit of the overlap functions
    p1 = sampler.idempotent(cover.lambda1, 1)
    # the overlap image of p1 must be conjugate to that of p2; use scalars
    one1 = IdempotentCert(FilteredMatrix.identity(cover.lambda1, 1), check=False)
    one2 = IdempotentCert(FilteredMatrix.identity(cover.lambda2, 1), check=False)
    unit_payload, unit_inv = sampler.unit(cover.lambda_prime)
    u = InvertibleCert(
        FilteredMatrix(cover.lambda_prime, ((unit_payload,),)),
        FilteredMatrix(cover.lambda_prime, ((unit_inv,),)),
    )
    glued = glue_idempotents(one1, one2, u, cover)
    glued.double.verify()
