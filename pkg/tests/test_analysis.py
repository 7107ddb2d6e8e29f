import numpy as np
import pytest

from polyvi import MonomialBasis, PolyhedralSet, PolynomialMap, SolveConfig, VIProblem
from polyvi.analysis import (
    copositivity_check,
    existence_certificate,
    gus_probe,
    is_r0_pair,
    monotonicity_check,
    r0_lower_degree_invariance_check,
    r0_scaling_invariance_check,
)
from polyvi.kkt import cp_conditions

from conftest import example1, example2, unit_box


def fit_map(n, d, f, rng):
    """Coefficients of a polynomial map of degree <= d from samples (exact by interpolation)."""
    b = MonomialBasis(n, d)
    X = rng.normal(size=(4 * len(b), n))
    M = np.array([b.evaluate(x) for x in X])
    Y = np.array([f(x) for x in X])
    A = np.linalg.lstsq(M, Y, rcond=None)[0].T
    A[np.abs(A) < 1e-10] = 0.0
    return PolynomialMap(b, A)


def convex_gradient(rng, n=2):
    """Gradient of sum (a_i.x)^4 / 4 + x^T G x / 2 with G psd; monotone with P(0) = 0."""
    a = rng.normal(size=(3, n))
    L = rng.normal(size=(n, n))
    G = L @ L.T
    return fit_map(n, 3, lambda x: ((a @ x) ** 3) @ a + G @ x, rng)


# R0


def test_r0_examples():
    K1, P1 = example1()
    v = is_r0_pair(K1, P1)
    assert v.status == "not_r0"
    w = v.witness
    assert np.arccos(min(1.0, w @ np.array([1.0, 1.0]) / np.sqrt(2))) < 1e-4
    K2, P2 = example2()
    assert is_r0_pair(K2, P2).status == "r0"
    rng = np.random.default_rng(0)
    for _ in range(3):
        P = PolynomialMap(MonomialBasis(2, 2), rng.normal(size=(2, 6)))
        assert is_r0_pair(unit_box(), P).status == "r0"


def test_r0_witnesses_satisfy_cp_conditions():
    K1, P1 = example1()
    v = is_r0_pair(K1, P1)
    for w in v.witnesses:
        assert cp_conditions(K1.recession_cone(), P1.leading_term(), w, 1e-8)


def test_r0_json_fields():
    K2, P2 = example2()
    js = is_r0_pair(K2, P2).to_json()
    assert js["status"] == "r0" and js["witnesses"] == [] and "thresholds" in js


def test_scaling_invariance_examples():
    K1, P1 = example1()
    K2, P2 = example2()
    assert r0_scaling_invariance_check(K2, P2, 2.0)
    assert r0_scaling_invariance_check(K1, P1, 0.5)
    assert r0_scaling_invariance_check(K1, P1, 1.0)


def test_lower_degree_invariance_examples():
    K2, P2 = example2()
    const = PolynomialMap.affine(np.zeros((2, 2)), [3.0, -7.0])
    assert r0_lower_degree_invariance_check(K2, P2, const)
    lin = PolynomialMap.affine([[1.0, -2.0], [4.0, 0.5]])
    assert r0_lower_degree_invariance_check(K2, P2, lin)
    assert r0_lower_degree_invariance_check(K2, P2, PolynomialMap.zeros(2, 1))


@pytest.mark.property_suite
def test_invariance_batteries():
    rng = np.random.default_rng(1)
    K1, P1 = example1()
    K2, P2 = example2()
    for _ in range(4):
        t = float(np.exp(rng.uniform(-2, 2)))
        assert r0_scaling_invariance_check(K1, P1, t)
        assert r0_scaling_invariance_check(K2, P2, t)
        Q1 = PolynomialMap(MonomialBasis(2, 1), rng.normal(size=(2, 3)))
        Q2 = PolynomialMap(MonomialBasis(2, 2), rng.normal(size=(2, 6)))
        assert r0_lower_degree_invariance_check(K1, P1, Q1)
        assert r0_lower_degree_invariance_check(K2, P2, Q2)


def test_lower_degree_check_requires_lower_degree():
    K2, P2 = example2()
    with pytest.raises(ValueError):
        r0_lower_degree_invariance_check(K2, P2, P2)


# copositivity


def test_copositivity_examples():
    K1, P1 = example1()
    K2, P2 = example2()
    assert copositivity_check(P1, K1).status == "copositive_numeric"
    assert copositivity_check(P2, K2).status == "copositive_numeric"
    neg = PolynomialMap.affine(-np.eye(2))
    v = copositivity_check(neg, PolyhedralSet.orthant(2))
    assert v.status == "not_copositive"
    x = v.witness
    assert PolyhedralSet.orthant(2).contains(x)
    assert abs(np.linalg.norm(x) - 1) < 1e-12
    assert neg.eval(x) @ x < -1e-10


def test_copositivity_detects_indefinite_quadratic():
    # <Mx, x> with M indefinite on the orthant
    M = np.array([[1.0, -3.0], [0.0, 1.0]])
    v = copositivity_check(PolynomialMap.affine(M), PolyhedralSet.orthant(2))
    assert v.status == "not_copositive"
    assert v.min_value == pytest.approx(-0.5, abs=1e-6)


@pytest.mark.property_suite
def test_monotone_implies_copositive():
    K2, P2 = example2()
    assert copositivity_check(P2, K2).status != "not_copositive"
    rng = np.random.default_rng(2)
    for _ in range(20):
        P = convex_gradient(rng)
        np.testing.assert_allclose(P.eval(np.zeros(2)), 0.0, atol=1e-9)
        K = PolyhedralSet.orthant(2) if rng.random() < 0.5 else K2
        assert copositivity_check(P, K, budget=8).status != "not_copositive"


# monotonicity


def test_monotonicity_examples():
    K1, P1 = example1()
    K2, P2 = example2()
    assert monotonicity_check(P2, K2).status == "strictly_monotone_numeric"
    v = monotonicity_check(P1, K1)
    assert v.status != "strictly_monotone_numeric"
    assert monotonicity_check(PolynomialMap.affine(np.eye(2)), PolyhedralSet.orthant(2)).status == \
        "strictly_monotone_numeric"


def test_monotonicity_negative():
    v = monotonicity_check(PolynomialMap.affine(-np.eye(2)), PolyhedralSet.orthant(2))
    assert v.status == "not_monotone"
    x, y = v.witness
    P = PolynomialMap.affine(-np.eye(2))
    assert (P(y) - P(x)) @ (y - x) < 0


# existence certificate


def test_existence_examples():
    K1, P1 = example1()
    K2, P2 = example2()
    assert existence_certificate(VIProblem(K1, P1, [1.0, 2.0])).conclusion == "nonempty_bounded"
    assert existence_certificate(VIProblem(K1, P1, [-1.0, -1.0])).conclusion == "no_certificate"
    assert existence_certificate(VIProblem(K2, P2, [7.0, -4.0])).conclusion == "nonempty_bounded"


def test_existence_premises_reported():
    K1, P1 = example1()
    c = existence_certificate(VIProblem(K1, P1, [-1.0, -1.0]))
    assert c.zero_in_K and c.copositivity.status == "copositive_numeric"
    assert c.p_in_int_sc_dual is False
    assert c.caveat
    js = c.to_json()
    assert js["conclusion"] == "no_certificate" and "premises" in js


def test_existence_zero_not_in_K():
    K = PolyhedralSet.box([1.0, 1.0], [2.0, 2.0])
    c = existence_certificate(VIProblem(K, PolynomialMap.affine(np.eye(2))))
    assert not c.zero_in_K and c.conclusion == "no_certificate"


def test_r0_auto_passes_interior_membership():
    K2, P2 = example2()
    rng = np.random.default_rng(3)
    for p in rng.normal(scale=5.0, size=(20, 2)):
        c = existence_certificate(VIProblem(K2, P2, p), budget=4)
        assert c.p_in_int_sc_dual is True


# GUS


def test_gus_examples():
    grid = [(a, b) for a in np.linspace(-2, 2, 5) for b in np.linspace(-2, 2, 5)]
    K1, P1 = example1()
    K2, P2 = example2()
    assert gus_probe(K2, P2, grid).status == "consistent_with_gus"
    assert gus_probe(PolyhedralSet.orthant(2), PolynomialMap.affine(np.eye(2)), grid).status == "consistent_with_gus"
    v = gus_probe(K1, P1, grid)
    assert v.status == "violated"


def test_gus_violation_is_reported_with_solutions():
    K1, P1 = example1()
    v = gus_probe(K1, P1, [(1.0, 1.0), (-1.0, -1.0)], SolveConfig())
    assert v.status == "violated" and v.reason == "nonisolated"
    np.testing.assert_array_equal(v.p, [-1.0, -1.0])
    assert len(v.solutions) >= 2
