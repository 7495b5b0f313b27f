import itertools

import pytest
from hypothesis import given, settings, strategies as st

from startensor.fpmod import (
    FPModule,
    Matrix,
    annihilated_by_power,
    certify_map,
    hom_module,
    mu,
    present_ideal,
    rank,
    torsion_submodule,
    unit_vec,
)
from startensor.groebner import groebner_basis
from startensor.poly import GF, QQ, PolyRing, vec_add
from startensor.fpmod import QuotientRing
from startensor.scenarios import EXAMPLE_GRAM, SWEEP_INSTANCES, sweep_instance
from startensor.star import (
    CertificateNotInvertible,
    CertificateNotSymmetric,
    EndAlgebra,
    MatrixStarCertificate,
    NotHomTarget,
    ScalarNotInvolutive,
    StarStructure,
    certificate_from_star,
    check_strong_self_dual,
    duality_from_maps,
    end_algebra,
    genset_sides,
    genset_transfer_check,
    gram_matrix,
    hom_coords,
    is_cyclic_over_E,
    mat_T,
    mat_eq,
    matrix_star_from_certificate,
    right_linearity_holds,
    star_from_duality,
    tensor_class,
    tensor_over_E,
    theta_check,
    torsion_T,
    trace_pairing,
)

from oracles import in_graded_span


def free(R, n=1, degs=None):
    return FPModule.free(R, n, degs)


def field_ring(F=QQ):
    return QuotientRing(PolyRing(["t"], [1], F), domain=True)


# ---------------------------------------------------------------- End algebras


def test_end_of_R(R):
    E = end_algebra(free(R, 1, (0,)))
    assert len(E) == 1
    assert E.verify()
    assert E.mult[0][0] == E.unit


def test_end_of_I_commutative(example):
    E = EndAlgebra(example.I)
    assert E.verify() and E.is_commutative()


def test_end_of_M_noncommutative(example):
    E = example.E
    assert E.verify()
    pairs = E.noncommuting_pairs()
    assert pairs
    # independent confirmation on one pair by graded linear algebra
    M, R = example.M, example.R
    i, j = pairs[0]
    A, B = E.mats[i], E.mats[j]
    AB, BA = A.compose(B, R), B.compose(A, R)
    witness = [vec_add(a, b, R.F, -1) for a, b in zip(AB.cols, BA.cols)]
    assert any(w and not in_graded_span(R, w, M.rels, M.degrees) for w in witness)


def test_end_generator_degrees(example):
    assert sorted(example.E.gen_degrees()) == [0, 1, 2, 2, 3, 3, 4, 4, 5]


# ---------------------------------------------------------------- self-duality


def test_example_self_duality(example):
    R, M, I = example.R, example.M, example.I
    assert check_strong_self_dual(M, I, example.alpha)
    G = gram_matrix(example.alpha)
    inc = I.inclusion
    got = [[R.fmt({m[1:]: c for m, c in inc.apply(G[i][j]).items()}) for j in range(3)] for i in range(3)]
    expected = [[R.fmt(R.elem(e)) for e in row] for row in EXAMPLE_GRAM]
    assert got == expected
    for i, j in itertools.product(range(3), repeat=2):
        assert I.equal_elems(G[i][j], G[j][i])


def test_R_self_dual(R):
    R1 = free(R, 1, (0,))
    H, maps = hom_module(R1, R1)
    alpha = duality_from_maps(R1, R1, [certify_map(Matrix.identity(R, 1), R1, R1)], H)
    assert check_strong_self_dual(R1, R1, alpha)
    star = star_from_duality(R1, R1, alpha)
    assert star.algebra.equal(star.image_mats[0], star.algebra.mats[0])


def test_twist_symmetry_follows_star(example):
    # alpha o g has symmetric Gram matrix exactly when g is fixed by the star
    R, M, I, E, star = example.R, example.M, example.I, example.E, example.star
    seen = set()
    for i, g in enumerate(E.mats):
        fixed = E.equal(star.image_mats[i], g)
        tw = certify_map(example.alpha.matrix.compose(g, R), M, example.H)
        G = gram_matrix(tw)
        sym = all(I.equal_elems(G[a][b], G[b][a]) for a, b in itertools.combinations(range(3), 2))
        assert sym == fixed
        if not fixed:
            assert not check_strong_self_dual(M, I, tw)
        seen.add(fixed)
    assert seen == {True, False}


def test_not_hom_target(example):
    M = example.M
    fake = certify_map(Matrix.identity(example.R, 3), M, M)
    with pytest.raises(NotHomTarget):
        check_strong_self_dual(M, example.I, fake)


# ---------------------------------------------------------------- star from duality


def test_example_star(example):
    star = example.star
    assert star.verify()
    assert star.provenance["sign"] == 1
    from startensor.star import duality_images

    assert right_linearity_holds(star, duality_images(example.alpha), example.I)
    E = example.E
    k = len(E)
    for i in range(k):
        assert E.equal(star.star_matrix(star.images[i]), E.mats[i])
    for i, j in itertools.product(range(k), repeat=2):
        assert E.equal(star.star_matrix(E.mult[i][j]), star.image_mats[j].compose(star.image_mats[i], example.R))
    # not the identity: the example's star is a genuine anti-involution
    assert any(not E.equal(a, b) for a, b in zip(star.image_mats, E.mats))


def _m_duality(example):
    R, m = example.R, example.m
    R1 = free(R, 1, (0,))
    H, _ = hom_module(m, R1)
    # alpha(a)(b) = a*b/x on m = (x,y,z)
    rows = [["x", "y", "z"], ["y", "z", "x^2"], ["z", "x^2", "x*y"]]
    maps = [certify_map(Matrix.from_rows(R, [r]), m, R1) for r in rows]
    return R1, duality_from_maps(m, R1, maps, H)


def test_star_on_commutative_end_is_identity(example):
    m = example.m
    R1, alpha = _m_duality(example)
    assert check_strong_self_dual(m, R1, alpha)
    E = EndAlgebra(m)
    assert E.is_commutative()
    star = star_from_duality(m, R1, alpha, E)
    assert all(E.equal(a, b) for a, b in zip(star.image_mats, E.mats))


def test_star_identity_on_End_R(R):
    E = EndAlgebra(free(R, 1, (0,)))
    assert StarStructure.identity(E).verify()


# ---------------------------------------------------------------- balanced tensor


def test_tensor_over_E_of_R(R):
    R1 = free(R, 1, (0,))
    star = StarStructure.identity(EndAlgebra(R1))
    T = tensor_over_E(R1, star)
    assert T.ngens == 1 and mu(T) == 1 and rank(T) == 1
    assert torsion_submodule(T)[0].is_zero()


def test_tensor_over_End_I(example):
    from startensor.fpmod import kernel, tensor_R

    I = example.I
    E = EndAlgebra(I)
    star = StarStructure.identity(E)
    TE = tensor_over_E(I, star)
    TR = tensor_R(I, I)
    assert rank(TE) == rank(TR) == 1
    surj = certify_map(Matrix.identity(example.R, 4), TR, TE)
    K, inc = kernel(surj)
    assert all(annihilated_by_power(TR, g) is not None for g in inc.matrix.cols)


def test_example_tensor_torsion(example):
    R, TE = example.R, example.TE
    e3 = unit_vec(R, 2)
    ts = tensor_class(TE, e3, e3)
    assert ts
    k = annihilated_by_power(TE, ts)
    assert k is not None and k >= 1
    assert not torsion_submodule(TE)[0].is_zero()
    # independent: e3(x)e3 is outside the relation span, x^k e3(x)e3 inside
    w = {(8,) + R.zero_exp: 1}
    assert not in_graded_span(R, w, TE.rels, TE.degrees)
    xk = {(8, k, 0, 0): 1}
    assert in_graded_span(R, xk, TE.rels, TE.degrees)


def test_tensor_generating_set_independence(example):
    M, star = example.M, example.star
    pairs = list(zip(star.algebra.mats, star.image_mats))
    T1 = tensor_over_E(M, star)
    T2 = tensor_over_E(M, star, pairs + pairs)
    R = example.R
    twice = pairs + [(a.add(b, R), sa.add(sb, R)) for (a, sa), (b, sb) in zip(pairs, pairs[1:] + pairs[:1])]
    T3 = tensor_over_E(M, star, twice)
    order = T1.order()
    g1 = groebner_basis(T1.rels, order, R.F, R.jgb)
    assert g1 == groebner_basis(T2.rels, order, R.F, R.jgb) == groebner_basis(T3.rels, order, R.F, R.jgb)


# ---------------------------------------------------------------- the submodule T


def test_T_for_R(R):
    R1 = free(R, 1, (0,))
    star = StarStructure.identity(EndAlgebra(R1))
    sub, gens, verdict = torsion_T(R1, star, 1, 1)
    assert not verdict["nonzero"] and verdict["torsion"]


def test_T_for_example(example):
    R, M, TE = example.R, example.M, example.TE
    _, gens1, v1 = torsion_T(M, example.star, 1, 1, TE)
    _, gens2, v2 = torsion_T(M, example.star, -1, 1, TE)
    # computed: T(1,1) vanishes, so it is torsion; T(-1,1) is not
    assert v1["torsion"] and not v1["nonzero"]
    assert v2["nonzero"] and not v2["torsion"]
    # independent check that each e_i(x)e_j - e_j(x)e_i is in the relation span
    for i, j in itertools.combinations(range(3), 2):
        w = {(3 * i + j,) + R.zero_exp: 1, (3 * j + i,) + R.zero_exp: -1}
        assert in_graded_span(R, w, TE.rels, TE.degrees)
    assert not all(
        in_graded_span(R, {(3 * i + j,) + R.zero_exp: 1, (3 * j + i,) + R.zero_exp: 1}, TE.rels, TE.degrees)
        for i, j in itertools.combinations(range(3), 2)
    )


def test_T_diagonal_zero_when_r_equals_s(example):
    # the i=j generators are (s-r) e_i(x)e_i, the zero vector for r = s
    from startensor.star import torsion_T as tT

    R = example.R
    R1 = free(R, 1, (0,))
    star = StarStructure.identity(EndAlgebra(R1))
    _, gens, _ = tT(R1, star, 1, 1)
    assert all(not g for g in gens)
    _, gens2, _ = tT(R1, star, -1, 1)
    assert gens2 and all(g == {(0,) + R.zero_exp: 2} for g in gens2 if g)


# ---------------------------------------------------------------- matrix stars


def test_transpose_certificate():
    Q = field_ring()
    cert = MatrixStarCertificate(Q, [[1, 0], [0, 1]], 1)
    star = matrix_star_from_certificate(cert)
    A = [[Q.elem("1"), Q.elem("2")], [Q.elem("3"), Q.elem("4")]]
    assert mat_eq(Q, star.apply(A), mat_T(A))


def test_symplectic_certificate():
    Q = field_ring()
    cert = MatrixStarCertificate(Q, [[0, 1], [-1, 0]], -1)
    assert matrix_star_from_certificate(cert).verify()


def test_certificate_errors():
    Q = field_ring()
    with pytest.raises(CertificateNotSymmetric):
        MatrixStarCertificate(Q, [[1, 1], [0, 1]], 1)
    with pytest.raises(CertificateNotSymmetric):
        MatrixStarCertificate(Q, [[1, 1], [0, 1]], -1)
    with pytest.raises(ScalarNotInvolutive):
        MatrixStarCertificate(Q, [[1, 0], [0, 1]], 2)
    with pytest.raises(CertificateNotInvertible):
        MatrixStarCertificate(Q, [[1, 1], [1, 1]], 1)
    with pytest.raises(CertificateNotInvertible):
        MatrixStarCertificate(Q, [["t", 0], [0, 1]], 1)


def test_certificate_from_transpose():
    Q = field_ring()
    cert = certificate_from_star(lambda A: mat_T(A), 2, Q)
    assert cert.a == Q.const(1)
    assert mat_eq(Q, cert.C, [[Q.const(1), {}], [{}, Q.const(1)]])


def test_certificate_from_symplectic_roundtrip():
    Q = field_ring()
    base = matrix_star_from_certificate(MatrixStarCertificate(Q, [[0, 1], [-1, 0]], -1))
    cert = certificate_from_star(base.apply, 2, Q)
    assert cert.a == Q.const(-1)
    again = matrix_star_from_certificate(cert)
    for k, l in itertools.product(range(2), repeat=2):
        from startensor.star import matrix_unit

        U = matrix_unit(Q, 2, k, l)
        assert mat_eq(Q, again.apply(U), base.apply(U))


def test_certificate_from_conjugated_transpose():
    Q = field_ring()
    D = MatrixStarCertificate(Q, [[1, 0], [0, 2]], 1)
    base = matrix_star_from_certificate(D)
    cert = certificate_from_star(base.apply, 2, Q)
    assert cert.a == Q.const(1)
    # C is D up to a unit scalar
    c = cert.C[0][0][Q.zero_exp]
    assert mat_eq(Q, cert.C, [[Q.const(c), {}], [{}, Q.const(2 * c)]])


def test_theta_examples():
    Q = field_ring()
    rep1 = theta_check(1, MatrixStarCertificate(Q, [[1]], 1))
    assert rep1["ok"]
    rep2 = theta_check(2, MatrixStarCertificate(Q, [[1, 0], [0, 1]], 1))
    assert rep2["ok"] and rep2["antisymmetry"]
    rep3 = theta_check(2, MatrixStarCertificate(Q, [[0, 1], [-1, 0]], -1))
    assert rep3["ok"] and rep3["free_rank_one"] and rep3["antisymmetry"]


def test_theta_over_semigroup_ring(R):
    rep = theta_check(2, MatrixStarCertificate(R, [[0, 1], [-1, 0]], -1))
    assert rep["ok"]


# ---------------------------------------------------------------- generating sets and cyclicity


def test_genset_transfer(example):
    R, M, star = example.R, example.M, example.star
    e = [unit_vec(R, i) for i in range(3)]
    assert genset_sides(M, star, e) == (True, True)
    assert genset_transfer_check(M, star, e)
    assert genset_sides(M, star, e[:1]) == (False, False)
    R1 = free(R, 1, (0,))
    sR = StarStructure.identity(EndAlgebra(R1))
    assert genset_sides(R1, sR, [unit_vec(R, 0)]) == (True, True)


def test_cyclicity(example):
    R = example.R
    R1 = free(R, 1, (0,))
    v = is_cyclic_over_E(R1, EndAlgebra(R1), "left")
    assert v.status == "cyclic" and v.witness == unit_vec(R, 0)
    t = hom_coords(example.H, example.f[2])
    vt = is_cyclic_over_E(example.H, example.E, "right", [t])
    assert vt.status == "cyclic"
    assert is_cyclic_over_E(example.M, None).status == "not-cyclic"
    vs = is_cyclic_over_E(example.M, example.E, "left", [unit_vec(R, 2)])
    assert vs.status == "cyclic"
    assert is_cyclic_over_E(example.M, example.E, "right", [unit_vec(R, 2)], star=example.star).status == "cyclic"


def test_cyclic_over_larger_end(example):
    # End(m) is the normalization, over which m is principal
    v = is_cyclic_over_E(example.m, EndAlgebra(example.m), "left")
    assert v.status == "cyclic"
    assert v.witness == unit_vec(example.R, 0)


def test_canonical_ideal_not_cyclic_over_end(example):
    # End(I) = R for the canonical ideal, and I needs two generators
    E = EndAlgebra(example.I)
    assert len(E) == 1
    v = is_cyclic_over_E(example.I, E, "left")
    assert v.status == "not-cyclic" and v.reason


# ---------------------------------------------------------------- trace pairing


def test_trace_pairing_example(example):
    R, M, I = example.R, example.M, example.I
    pairing, rep = trace_pairing(M, example.star, I, example.alpha, example.TE)
    assert pairing.verify()
    e3 = unit_vec(R, 2)
    ts = tensor_class(example.TE, e3, e3)
    assert ts and I.is_zero_elem(pairing.apply(ts))
    assert rep["rank_source"] == rep["rank_target"] == 1
    assert rep["kernel_ngens"] > 0 and rep["kernel_torsion"]


def test_trace_pairing_on_R(R):
    R1 = free(R, 1, (0,))
    H, _ = hom_module(R1, R1)
    alpha = duality_from_maps(R1, R1, [certify_map(Matrix.identity(R, 1), R1, R1)], H)
    star = star_from_duality(R1, R1, alpha)
    pairing, rep = trace_pairing(R1, star, R1, alpha)
    x = {(0, 1, 0, 0): 1}
    img = pairing.apply(tensor_class(tensor_over_E(R1, star), x, unit_vec(R, 0)))
    assert img == x


# ---------------------------------------------------------------- properties

SMALL = [0, 1, -1, 2]


@settings(max_examples=25)
@given(st.lists(st.sampled_from(SMALL), min_size=4, max_size=4), st.sampled_from([1, -1]), st.sampled_from([QQ, GF(3), GF(5)]))
def test_theta_law_for_valid_certificates(entries, a, F):
    Q = field_ring(F)
    C = [entries[:2], entries[2:]]
    try:
        cert = MatrixStarCertificate(Q, C, a)
    except (CertificateNotSymmetric, CertificateNotInvertible, ScalarNotInvolutive):
        return
    assert matrix_star_from_certificate(cert).verify()
    rep = theta_check(2, cert)
    assert rep["ok"] and rep["free_rank_one"] and rep["antisymmetry"]


@pytest.mark.parametrize("name,semigroup,gens", SWEEP_INSTANCES[:6])
def test_T_law_on_sweep_instances(name, semigroup, gens):
    from startensor.groebner import toric_ideal

    S, G = toric_ideal(semigroup, QQ)
    R = QuotientRing(S, G.polys(), domain=True)
    I, _ = present_ideal(R, list(gens))
    star = StarStructure.identity(EndAlgebra(I))
    TE = tensor_over_E(I, star)
    _, tgens, verdict = torsion_T(I, star, 1, 1, TE)
    assert verdict["torsion"]
    assert all(annihilated_by_power(TE, g) is not None for g in tgens)


@pytest.mark.parametrize("inst", SWEEP_INSTANCES, ids=[i[0] for i in SWEEP_INSTANCES])
def test_main_implication_instances(inst):
    res = sweep_instance(*inst, QQ)
    assert res["implication holds"]
    assert res["E commutative"]
