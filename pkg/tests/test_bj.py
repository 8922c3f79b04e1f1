import math

import numpy as np
import pytest

import oracles
from bjortho.bj import (
    bj,
    bj_ck_complex,
    bj_ck_real,
    bj_generic,
    bj_lp,
    bj_matrix,
    bj_rank_one,
    functional_certificate,
    in_span,
    lp_criterion_sum,
    rank_one_operator,
    sbj_ck,
)
from bjortho.errors import DegenerateZero, NoCertificate, RoleError, ShapeError
from bjortho.spaces import FiniteFunction, MatrixOperator, ScalarField, norm
from bjortho.verdict import (
    ArgminCertificate,
    Decision,
    FunctionalCertificate,
    HullCertificate,
    PointCertificate,
    WitnessVectorCertificate,
    validate_certificate,
    validate_verdict,
)

C = ScalarField.COMPLEX
R = ScalarField.REAL
ORTH, NOT, INC = Decision.ORTHOGONAL, Decision.NOT_ORTHOGONAL, Decision.INCONCLUSIVE


def sup(v, field=None):
    return FiniteFunction.sup(v, field=field)


def cvec(rng, n):
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def assert_valid(v, x, y):
    res = validate_verdict(v, x, y)
    assert res.ok, res.problems


# ---------------------------------------------------------------------------
# generic minimisation


def test_identity_against_constant():
    t = np.linspace(0, 1, 101)
    ident, one = sup(t, C), sup(np.ones(101), C)
    v = bj_generic(ident, one)
    assert v.decision is NOT
    assert v.certificate.achieved_norm == pytest.approx(0.5, abs=1e-7)
    assert abs(v.certificate.alpha_star + 0.5) <= 1e-6
    assert_valid(v, ident, one)


def test_orthogonality_is_not_symmetric():
    t = np.linspace(0, 1, 101)
    ident, one = sup(t, C), sup(np.ones(101), C)
    assert not bj_generic(ident, one).orthogonal
    assert bj_generic(one, ident).orthogonal


def test_self_cancellation():
    rng = np.random.default_rng(0)
    for x in (sup(cvec(rng, 4)), FiniteFunction.lp(rng.standard_normal(3), 2.5),
              MatrixOperator.of(rng.standard_normal((2, 2)))):
        v = bj_generic(x, x)
        assert v.decision is NOT
        assert v.certificate.alpha_star == pytest.approx(-1, abs=1e-6)
        assert v.certificate.achieved_norm == pytest.approx(0, abs=1e-6)


def test_zero_direction_is_orthogonal():
    x = sup([1.0, -2.0])
    v = bj_generic(x, sup([0.0, 0.0]))
    assert v.orthogonal and v.margin == 0.0 and v.certificate.alpha_star == 0


def test_zero_base_raises():
    with pytest.raises(DegenerateZero):
        bj_generic(sup([0.0, 0.0]), sup([1.0, 2.0]))


def test_generic_matches_dense_grid_oracle_sup_c3():
    rng = np.random.default_rng(1)
    for k in range(25):
        x, y = cvec(rng, 3), cvec(rng, 3)
        if k % 2:
            # planted: three max points whose products surround 0
            x = np.exp(1j * rng.uniform(0, 2 * np.pi, 3))
            y = np.exp(1j * (rng.uniform(0, 1) + 2 * np.pi * np.arange(3) / 3)) / np.conj(x)
        v = bj_generic(sup(x), sup(y))
        ref, _ = oracles.pencil_min("sup", x, y, True)
        nx = oracles.sup_norm(x)
        assert v.certificate.achieved_norm <= ref + 1e-9 * nx
        assert v.certificate.achieved_norm >= ref - 1e-9 * nx - 1e-12
        assert v.orthogonal == (ref >= nx * (1 - 1e-7))


def test_generic_matches_dense_grid_oracle_other_spaces():
    rng = np.random.default_rng(2)
    for k in range(10):
        x, y = rng.standard_normal(4), rng.standard_normal(4)
        w = rng.uniform(0.5, 2, 4)
        v = bj_generic(FiniteFunction.lp(x, 1.5, w), FiniteFunction.lp(y, 1.5, w))
        ref, _ = oracles.pencil_min("lp", x, y, False, p=1.5, w=w)
        assert v.certificate.achieved_norm == pytest.approx(ref, abs=1e-9)
        a, b = rng.standard_normal((2, 2)), rng.standard_normal((2, 2))
        v = bj_generic(MatrixOperator.of(a), MatrixOperator.of(b))
        ref, _ = oracles.pencil_min("spectral", a, b, False)
        assert v.certificate.achieved_norm == pytest.approx(ref, abs=1e-9)


def test_achieved_never_exceeds_norm():
    rng = np.random.default_rng(3)
    for _ in range(100):
        x, y = sup(cvec(rng, 5)), sup(cvec(rng, 5))
        v = bj_generic(x, y)
        assert v.certificate.achieved_norm <= norm(x) + 1e-12
        assert v.margin <= 0


# ---------------------------------------------------------------------------
# C(K), complex


def test_three_point_pairs_not_orthogonal():
    f1, f2 = sup([1, 1 + 2j, 1 - 2j]), sup([1, 1, 1], C)
    g1, g2 = sup([1, -1 + 2j, -1 - 2j]), sup([2, 2, 2], C)
    for f, g, seg in ((f1, f2, {1 + 2j, 1 - 2j}), (g1, g2, {-2 + 4j, -2 - 4j})):
        v = bj_ck_complex(f, g)
        assert v.decision is NOT
        assert {complex(z) for z in v.details["hull_vertices"]} == seg
        assert_valid(v, f, g)
    v = bj_ck_complex(f1, f2)
    # distance of the segment [1-2i, 1+2i] from 0, scaled by ||f|| ||g|| = sqrt 5
    assert v.details["hull_distance"] == pytest.approx(1 / math.sqrt(5))


def test_hull_with_zero_direction():
    v = bj_ck_complex(sup([1j, 2.0]), sup([0, 0], C))
    assert v.orthogonal
    assert_valid(v, sup([1j, 2.0]), sup([0, 0], C))


def test_hull_certificate_on_planted_triangle():
    f = sup([1, 1j, -1, 0.2])
    g = sup(np.array([1, np.exp(2j * np.pi / 3), np.exp(-2j * np.pi / 3), 5]) / np.conj([1, 1j, -1, 0.2]))
    v = bj_ck_complex(f, g)
    assert v.orthogonal and isinstance(v.certificate, HullCertificate)
    assert_valid(v, f, g)


def test_complex_criterion_requires_sup_space():
    with pytest.raises(RoleError):
        bj_ck_complex(FiniteFunction.lp([1.0], 2.0), FiniteFunction.lp([1.0], 2.0))


# ---------------------------------------------------------------------------
# C(K), real


def test_real_sign_flip():
    f, g = sup([1.0, -1.0]), sup([1.0, 1.0])
    v = bj_ck_real(f, g)
    assert v.orthogonal
    assert isinstance(v.certificate, PointCertificate) and set(v.certificate.indices) == {0, 1}
    assert_valid(v, f, g)


def test_real_one_signed_products():
    f, g = sup([1.0, 1.0]), sup([0.5, 0.7])
    v = bj_ck_real(f, g)
    assert v.decision is NOT
    assert_valid(v, f, g)


def test_real_zero_product_counts_for_both_signs():
    f, g = sup([2.0, 1.0]), sup([0.0, 3.0])
    v = bj_ck_real(f, g)
    assert v.orthogonal
    assert_valid(v, f, g)


def test_tiny_decrease_is_inconclusive():
    # the criterion sees a positive product, but moving along the pencil only
    # gains about 1e-8 before the second point catches up
    f, g = sup([1.0, 0.5]), sup([1e-8, 1.0])
    v = bj_ck_real(f, g)
    assert v.decision is INC
    assert abs(v.margin) < 1e-7
    assert_valid(v, f, g)


# ---------------------------------------------------------------------------
# L^p


def test_lp_disjoint_supports():
    f, g = FiniteFunction.lp([1.0, 0.0], 2.0), FiniteFunction.lp([0.0, 1.0], 2.0)
    v = bj_lp(f, g)
    assert v.orthogonal and v.details["weighted_sum"] == 0
    assert_valid(v, f, g)


def test_lp_symmetric_cancellation():
    f, g = FiniteFunction.lp([1.0, 1.0], 3.0), FiniteFunction.lp([1.0, -1.0], 3.0)
    assert lp_criterion_sum(f, g) == 0
    v = bj_lp(f, g)
    assert v.orthogonal
    assert_valid(v, f, g)


def test_lp_span_case_delegates():
    f, g = FiniteFunction.lp([1.0, 2.0], 3.0), FiniteFunction.lp([-2.0, -4.0], 3.0)
    assert in_span(f, g, 1e-9)
    v = bj_lp(f, g)
    assert v.method == "lp:generic" and v.decision is NOT
    assert_valid(v, f, g)


def test_lp_matches_generic():
    rng = np.random.default_rng(4)
    for p in (1.5, 2.0, 3.0):
        for k in range(100):
            w = rng.uniform(0.5, 2, 4)
            f = FiniteFunction.lp(rng.standard_normal(4), p, w)
            g = FiniteFunction.lp(rng.standard_normal(4), p, w)
            if k % 2:
                s = lp_criterion_sum(f, g) / lp_criterion_sum(f, f)
                g = g.with_values((g.values - s * f.values).real)
            v, ref = bj_lp(f, g), bj_generic(f, g)
            assert v.decision is ref.decision, (p, k, v.margin, ref.margin)
            assert_valid(v, f, g)


# ---------------------------------------------------------------------------
# matrices


def _kron_pair():
    p = MatrixOperator.of(np.diag([1.0, 0, 2, 0]), C)
    q = MatrixOperator.of(np.array([[1, 0, 1, 0], [0, 1, 0, 1], [1, 0, 0, 0], [0, 1, 0, 0.0]]), C)
    return p, q


def test_kronecker_pair_witness():
    p, q = _kron_pair()
    v = bj_matrix(p, q)
    assert v.orthogonal and isinstance(v.certificate, WitnessVectorCertificate)
    x = v.certificate.x
    assert abs(abs(x[2]) - 1) <= 1e-9
    assert_valid(v, p, q)


def test_small_pair_witness():
    a = MatrixOperator.of(np.diag([1.0, 2.0]), C)
    c = MatrixOperator.of(np.array([[1.0, 1.0], [1.0, 0.0]]), C)
    v = bj_matrix(a, c)
    assert v.orthogonal and abs(abs(v.certificate.x[1]) - 1) <= 1e-9


def test_projection_against_identity():
    b = MatrixOperator.of(np.diag([1.0, 0.0]), C)
    v = bj_matrix(b, MatrixOperator.of(np.eye(2), C))
    assert v.decision is NOT and v.margin < -0.1


def test_matrix_shape_mismatch():
    with pytest.raises(ShapeError):
        bj_matrix(MatrixOperator.of(np.eye(2)), MatrixOperator.of(np.eye(3)))


def test_witness_in_repeated_top_singular_space():
    # ||I|| is attained everywhere; any x with <x, Bx> = 0 is a witness
    i3 = MatrixOperator.of(np.eye(3), C)
    b = MatrixOperator.of(np.diag([1.0, -1.0, 2.0]), C)
    v = bj_matrix(i3, b)
    assert v.orthogonal and isinstance(v.certificate, WitnessVectorCertificate)
    assert_valid(v, i3, b)


# ---------------------------------------------------------------------------
# rank one


def test_rank_one_orthonormal():
    e = np.eye(3)
    v = bj_rank_one(e[0], e[1], e[1], e[2])
    assert v.orthogonal
    assert_valid(v, rank_one_operator(e[0], e[1]), rank_one_operator(e[1], e[2]))


def test_rank_one_self():
    e = np.eye(3)
    v = bj_rank_one(e[0], e[0], e[0], e[0])
    assert v.decision is NOT
    assert_valid(v, rank_one_operator(e[0], e[0]), rank_one_operator(e[0], e[0]))


def test_rank_one_zero_factor_raises():
    with pytest.raises(DegenerateZero):
        bj_rank_one(np.zeros(3), np.ones(3), np.ones(3), np.ones(3))


def test_rank_one_agrees_with_matrix_decision():
    rng = np.random.default_rng(5)
    for k in range(300):
        x, y, z, w = (cvec(rng, 3) for _ in range(4))
        if k % 3 == 1:
            z = z - np.vdot(x, z) / np.vdot(x, x) * x
        elif k % 3 == 2:
            w = w - np.vdot(y, w) / np.vdot(y, y) * y
        a, b = rank_one_operator(x, y), rank_one_operator(z, w)
        v, ref = bj_rank_one(x, y, z, w), bj_matrix(a, b)
        assert v.decision is ref.decision, k
        assert_valid(v, a, b)


# ---------------------------------------------------------------------------
# strong orthogonality


def test_strong_with_zero_on_peak():
    v = sbj_ck(sup([2.0, 1.0]), sup([0.0, 5.0]))
    assert v.orthogonal and v.certificate.indices == (0,)


def test_strong_without_zero_on_peak():
    f, g = sup([2.0, 1.0]), sup([1.0, 0.0])
    v = sbj_ck(f, g)
    assert v.decision is NOT
    assert_valid(v, f, g)


def test_strong_implies_plain():
    rng = np.random.default_rng(6)
    seen = 0
    for k in range(300):
        f = cvec(rng, 4) * 0.5
        idx = rng.choice(4, int(rng.integers(1, 3)), replace=False)
        f[idx] = np.exp(1j * rng.uniform(0, 6.3, len(idx)))
        g = cvec(rng, 4)
        if k % 2:
            g[rng.choice(idx)] = 0
        s = sbj_ck(sup(f), sup(g))
        assert_valid(s, sup(f), sup(g))
        if s.orthogonal:
            seen += 1
            assert bj_ck_complex(sup(f), sup(g)).orthogonal
    assert seen >= 100


# ---------------------------------------------------------------------------
# scale invariance and dispatch


def _scaled(x, c):
    """Nonzero scalar multiple of ``x``."""
    return x * c


@pytest.mark.parametrize("proc", ["ck_complex", "ck_real", "lp", "sbj", "generic", "matrix"])
def test_scale_invariance(proc):
    rng = np.random.default_rng(hash(proc) % 2**32)
    trials = 200 if proc != "matrix" else 60
    for k in range(trials):
        if proc == "ck_complex":
            x, y = sup(cvec(rng, 3)), sup(cvec(rng, 3))
            if k % 2:
                y = y.with_values(np.where(np.abs(x.values) == norm(x), 0, y.values))
            fn = bj_ck_complex
            c, d = complex(*rng.standard_normal(2)), complex(*rng.standard_normal(2))
        elif proc == "ck_real":
            x, y = sup(rng.choice([-2.0, -1.0, 1.0, 2.0], 4)), sup(rng.standard_normal(4))
            fn = bj_ck_real
            c, d = rng.standard_normal(2)
        elif proc == "lp":
            x = FiniteFunction.lp(rng.standard_normal(3), 3.0)
            y = FiniteFunction.lp(rng.standard_normal(3), 3.0)
            if k % 2:
                s = lp_criterion_sum(x, y) / lp_criterion_sum(x, x)
                y = y.with_values((y.values - s * x.values).real)
            fn = bj_lp
            c, d = rng.standard_normal(2)
        elif proc == "sbj":
            x, y = sup(cvec(rng, 3)), sup(cvec(rng, 3))
            if k % 2:
                y = y.with_values(np.where(np.abs(x.values) == norm(x), 0, y.values))
            fn = sbj_ck
            c, d = complex(*rng.standard_normal(2)), complex(*rng.standard_normal(2))
        elif proc == "generic":
            x, y = sup(cvec(rng, 3)), sup(cvec(rng, 3))
            fn = bj_generic
            c, d = complex(*rng.standard_normal(2)), complex(*rng.standard_normal(2))
        else:
            a = rng.standard_normal((2, 2))
            x, y = MatrixOperator.of(a), MatrixOperator.of(rng.standard_normal((2, 2)))
            if k % 2:
                u, _, vh = np.linalg.svd(a)
                y = y.with_entries(y.entries - (u[:, 0] @ y.entries @ vh[0]) * np.outer(u[:, 0], vh[0]))
            fn = bj_matrix
            c, d = rng.standard_normal(2)
        v1, v2 = fn(x, y), fn(_scaled(x, c), _scaled(y, d))
        assert v1.decision is v2.decision, (proc, k)
        # margins are relative, so they must not move either
        assert abs(v1.margin - v2.margin) <= 1e-8, (proc, k)


def test_dispatch_picks_criterion():
    assert bj(sup([1.0, -1.0]), sup([1.0, 1.0])).method == "ck_real"
    assert bj(sup([1j, 1.0]), sup([1.0, 1.0], C)).method == "ck_complex"
    assert bj(FiniteFunction.lp([1.0, 0.0], 2.0), FiniteFunction.lp([0.0, 1.0], 2.0)).method == "lp"
    assert bj(MatrixOperator.of(np.eye(2)), MatrixOperator.of(np.eye(2))).method == "matrix"


# ---------------------------------------------------------------------------
# functional certificates


def test_two_point_functional():
    f, g = sup([1.0, -1.0]), sup([1.0, 1.0])
    phi = functional_certificate(f, g, bj_ck_real(f, g))
    assert np.allclose(phi.phi.coeffs, [0.5, -0.5])
    assert phi.phi(f) == pytest.approx(1.0) and abs(phi.phi(g)) <= 1e-12


def test_three_point_product_functional():
    f1, g1 = np.array([1, 1 + 2j, 1 - 2j]), np.array([1, -1 + 2j, -1 - 2j])
    h1 = sup(np.outer(f1, g1).ravel())
    h2 = sup(np.outer(np.ones(3), 2 * np.ones(3)).ravel(), C)
    phi = functional_certificate(h1, h2, bj_ck_complex(h1, h2))
    assert np.count_nonzero(phi.phi.coeffs) == 3
    assert validate_certificate(phi, h1, h2, ORTH).ok
    assert phi.phi.dual_norm() == pytest.approx(1.0)


def test_p2_functional():
    f, g = FiniteFunction.lp([1.0, 0.0], 2.0), FiniteFunction.lp([0.0, 1.0], 2.0)
    phi = functional_certificate(f, g, bj_lp(f, g))
    assert np.allclose(phi.phi.coeffs, [1.0, 0.0])


def test_matrix_functional_from_witness():
    p, q = _kron_pair()
    phi = functional_certificate(p, q, bj_matrix(p, q))
    assert isinstance(phi, FunctionalCertificate)
    assert validate_certificate(phi, p, q, ORTH).ok


def test_no_functional_for_non_orthogonal():
    f, g = sup([1.0, 1.0]), sup([0.5, 0.7])
    with pytest.raises(NoCertificate):
        functional_certificate(f, g, bj_ck_real(f, g))


def test_functional_certificates_on_random_orthogonal_pairs():
    rng = np.random.default_rng(7)
    for _ in range(100):
        f = np.exp(1j * rng.uniform(0, 6.3, 4))
        f[3] *= 0.3
        g = np.exp(1j * (rng.uniform(0, 1) + 2 * np.pi * np.arange(4) / 3)) / np.conj(f)
        g[3] = 7.0
        x, y = sup(f), sup(g)
        v = bj_ck_complex(x, y)
        assert v.orthogonal
        assert validate_certificate(functional_certificate(x, y, v), x, y, ORTH).ok


def test_criterion_matches_generic_complex_and_real():
    rng = np.random.default_rng(8)
    for k in range(200):
        f = cvec(rng, 4)
        g = cvec(rng, 4)
        if k % 2:
            idx = np.argsort(-np.abs(f))[:3]
            f[idx] = np.exp(1j * rng.uniform(0, 6.3, 3))
            g[idx] = np.exp(1j * (rng.uniform(0, 6.3) + 2 * np.pi * np.arange(3) / 3)) / np.conj(f[idx])
        assert bj_ck_complex(sup(f), sup(g)).decision is bj_generic(sup(f), sup(g)).decision
        fr = rng.choice([-1.0, 1.0, 0.5], 5)
        gr = rng.standard_normal(5)
        assert bj_ck_real(sup(fr), sup(gr)).decision is bj_generic(sup(fr), sup(gr)).decision
