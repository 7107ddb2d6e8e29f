import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import linprog

from polyvi.polyhedra import (
    CapExceeded,
    EmptySetError,
    GeneratorRep,
    PolyhedralCone,
    PolyhedralSet,
    int_dual_membership,
)

from conftest import example1, example2, triangle, unit_box


def in_generated(gens: GeneratorRep, x, tol=1e-7):
    """LP membership of x in conv(V) + cone(R) + span(L)."""
    V, R, L = gens.vertices, gens.rays, gens.lineality
    nv, nr, nl = len(V), len(R), len(L)
    cols = [M.T for M in (V, R, L) if len(M)]
    A = np.hstack(cols)
    A_eq = np.vstack([A, np.concatenate([np.ones(nv), np.zeros(nr + nl)])])
    b_eq = np.concatenate([x, [1.0]])
    bounds = [(0, None)] * (nv + nr) + [(None, None)] * nl
    res = linprog(np.zeros(nv + nr + nl), A_eq=A_eq, b_eq=b_eq, bounds=bounds, method="highs")
    return res.status == 0


def cone_gens_equal(C1, C2, tol=1e-9):
    g1, g2 = C1.generators(), C2.generators()
    return all(C2.contains(r, tol) for r in np.vstack([g1.rays, g1.lineality, -g1.lineality])) and all(
        C1.contains(r, tol) for r in np.vstack([g2.rays, g2.lineality, -g2.lineality])
    )


# construction


def test_empty_set_rejected():
    with pytest.raises(EmptySetError):
        PolyhedralSet([[1.0, 0.0], [-1.0, 0.0]], [0.0, -1.0])


def test_json_round_trip():
    K = triangle()
    K2 = PolyhedralSet.from_json(K.to_json(), n=2)
    assert np.array_equal(K.C, K2.C) and np.array_equal(K.b, K2.b)
    W = PolyhedralSet.from_json({"C": [], "b": [], "E": [], "d": []}, n=3)
    assert W.s == 0 and W.t == 0 and W.n == 3


# recession cone


def test_recession_cone_examples():
    K1, _ = example1()
    assert cone_gens_equal(K1.recession_cone(), PolyhedralSet.orthant(2))
    assert unit_box().recession_cone().is_trivial()
    K2, _ = example2()
    R = K2.recession_cone()
    assert cone_gens_equal(R, K2)
    g = R.generators()
    assert len(g.lineality) == 1 and len(g.rays) == 1


def test_recession_cone_of_random_boxes_is_trivial():
    rng = np.random.default_rng(0)
    for _ in range(10):
        lo = rng.normal(size=3)
        hi = lo + rng.uniform(0.1, 2.0, size=3)
        assert PolyhedralSet.box(lo, hi).recession_cone().is_trivial()


def test_recession_cone_of_cone_is_itself():
    rng = np.random.default_rng(1)
    for _ in range(10):
        C = rng.normal(size=(3, 3))
        K = PolyhedralSet(C, np.zeros(3))
        assert cone_gens_equal(K.recession_cone(), K)


# dual cone


def test_dual_cone_examples():
    d = PolyhedralCone(-np.eye(2)).dual_cone()
    np.testing.assert_allclose(d.rays, [[0.0, 1.0], [1.0, 0.0]])
    assert len(d.lineality) == 0
    d2 = PolyhedralCone([[-1.0, 0.0]]).dual_cone()
    np.testing.assert_allclose(d2.rays, [[1.0, 0.0]])
    assert len(d2.lineality) == 0
    zero = PolyhedralCone(np.vstack([np.eye(2), -np.eye(2)]))
    dz = zero.dual_cone()
    assert len(dz.lineality) == 2


def test_dual_cone_soundness():
    rng = np.random.default_rng(2)
    for _ in range(10):
        C = rng.normal(size=(4, 3))
        K = PolyhedralCone(C)
        X = K.sample(rng, 100, scale=2.0)
        for y in K.dual_cone().rays:
            assert np.all(X @ y >= -1e-10)


def test_dual_cone_of_half_plane_sampled():
    K = PolyhedralCone([[-1.0, 0.0]])
    rng = np.random.default_rng(3)
    X = K.sample(rng, 200, scale=3.0)
    (y,) = K.dual_cone().rays
    assert np.all(X @ y >= -1e-12)


# pseudo-faces


def test_pseudo_face_counts():
    assert [f.alpha for f in PolyhedralSet.orthant(2).pseudo_faces()] == [(), (0,), (1,), (0, 1)]
    assert len(example2()[0].pseudo_faces()) == 2
    T = triangle()
    alphas = [f.alpha for f in T.pseudo_faces()]
    assert len(alphas) == 7 and (0, 1, 2) not in alphas


def test_face_cap():
    K = PolyhedralSet.box(np.zeros(11), np.ones(11))
    with pytest.raises(CapExceeded):
        K.pseudo_faces()


@pytest.mark.property_suite
@pytest.mark.parametrize("K", [triangle(), unit_box(3), PolyhedralSet.orthant(3), example2()[0]])
def test_pseudo_face_partition(K):
    rng = np.random.default_rng(4)
    gens = K.generators()
    X = K.sample(rng, 700)
    # mix in points on faces: vertices and edge midpoints
    V = gens.vertices
    extra = [V[i] for i in range(len(V))] + [(V[i] + V[j]) / 2 for i in range(len(V)) for j in range(i)]
    X = np.vstack([X, np.array(extra).reshape(-1, K.n)])[:1000]
    faces = K.pseudo_faces()
    for x in X:
        hits = sum(f.contains(x) for f in faces)
        assert hits == 1


# LICQ


def test_licq_examples():
    assert PolyhedralSet.orthant(2).licq_check().holds
    assert example2()[0].licq_check().holds
    dup = PolyhedralSet([[1.0, 0.0], [1.0, 0.0], [-1.0, 0.0]], [1.0, 1.0, 0.0])
    res = dup.licq_check()
    assert not res.holds
    assert set(res.face.alpha) >= {0, 1}


# generators


def test_generator_examples():
    g = unit_box().generators()
    assert len(g.vertices) == 4 and len(g.rays) == 0
    g = PolyhedralSet.orthant(2).generators()
    np.testing.assert_allclose(g.vertices, [[0.0, 0.0]])
    np.testing.assert_allclose(g.rays, [[0.0, 1.0], [1.0, 0.0]])
    g = example2()[0].generators()
    np.testing.assert_allclose(g.vertices, [[0.0, 0.0]])
    np.testing.assert_allclose(g.rays, [[1.0, 0.0]])
    np.testing.assert_allclose(np.abs(g.lineality), [[0.0, 1.0]])


@pytest.mark.parametrize("K", [example2()[0], triangle(), PolyhedralSet.orthant(3),
                               PolyhedralSet([[1.0, 1.0, 0.0], [-1.0, 0.0, 0.0]], [1.0, 0.0])])
def test_generator_membership_cross_check(K):
    rng = np.random.default_rng(5)
    gens = K.generators()
    for x in K.sample(rng, 50, scale=2.0):
        assert K.contains(x, 1e-9)
    box = 4.0
    for x in rng.uniform(-box, box, size=(100, K.n)):
        assert in_generated(gens, x) == K.contains(x, 1e-9)


def test_rays_are_unit_and_sorted():
    K = PolyhedralSet(np.random.default_rng(6).normal(size=(3, 3)), np.zeros(3))
    g = K.generators()
    np.testing.assert_allclose(np.linalg.norm(g.rays, axis=1), 1.0)
    assert [tuple(r) for r in g.rays] == sorted(tuple(r) for r in g.rays)


# LP oracle


def test_lp_examples():
    O = PolyhedralSet.orthant(2)
    r = O.lp_minimize([1.0, 1.0])
    assert r.bounded and r.value == 0.0
    np.testing.assert_array_equal(r.point, [0.0, 0.0])
    r = O.lp_minimize([-1.0, 0.0])
    assert not r.bounded
    np.testing.assert_array_equal(r.ray, [1.0, 0.0])
    r = triangle().lp_minimize([1.0, 1.0])
    assert r.bounded and r.value == 0.0


def test_lp_matches_vertex_enumeration_on_bounded_sets():
    rng = np.random.default_rng(7)
    for _ in range(20):
        lo = rng.normal(size=2)
        hi = lo + rng.uniform(0.5, 2, size=2)
        K = PolyhedralSet.box(lo, hi)
        c = rng.normal(size=2)
        r = K.lp_minimize(c)
        corners = np.array([[a, b] for a in (lo[0], hi[0]) for b in (lo[1], hi[1])])
        assert r.bounded
        assert r.value == pytest.approx((corners @ c).min(), abs=1e-12)
        ref = linprog(c, A_ub=K.C, b_ub=K.b, bounds=[(None, None)] * 2, method="highs")
        assert r.value == pytest.approx(ref.fun, abs=1e-9)


# contains


def test_contains_examples():
    O = PolyhedralSet.orthant(2)
    assert O.contains([0.0, 0.0])
    assert O.contains([-1e-12, 0.0], tol=1e-9)
    assert not O.contains([-1.0, 0.0])


# interior of dual


def test_int_dual_membership_examples():
    sc = GeneratorRep(np.zeros((1, 2)), np.array([[1.0, 1.0]]) / np.sqrt(2), np.zeros((0, 2)))
    assert int_dual_membership(sc, [1.0, 2.0])
    assert not int_dual_membership(sc, [1.0, -2.0])
    trivial = GeneratorRep(np.zeros((1, 2)), np.zeros((0, 2)), np.zeros((0, 2)))
    assert int_dual_membership(trivial, [-5.0, 3.0])
    lin = GeneratorRep(np.zeros((1, 2)), np.zeros((0, 2)), np.array([[0.0, 1.0]]))
    assert not int_dual_membership(lin, [1.0, 1.0])


# properties


@st.composite
def polyhedra(draw):
    n = draw(st.integers(2, 3))
    s = draw(st.integers(1, 5))
    seed = draw(st.integers(0, 2**31 - 1))
    rng = np.random.default_rng(seed)
    C = rng.normal(size=(s, n))
    x0 = rng.normal(size=n)
    b = C @ x0 + rng.uniform(0.0, 1.0, size=s)
    return PolyhedralSet(C, b), seed


@pytest.mark.property_suite
@settings(max_examples=30, deadline=None)
@given(polyhedra())
def test_K_plus_recession_cone(data):
    K, seed = data
    rng = np.random.default_rng(seed + 1)
    R = K.recession_cone().generators()
    dirs = np.vstack([R.rays, R.lineality, -R.lineality])
    for k in K.sample(rng, 10):
        for v in dirs:
            for t in (0.0, 0.5, 3.0, 100.0):
                assert K.contains(k + t * v, 1e-7 * (1 + t))


@pytest.mark.property_suite
@settings(max_examples=30, deadline=None)
@given(polyhedra())
def test_cone_scaling_closure(data):
    K, seed = data
    C = K.recession_cone()
    rng = np.random.default_rng(seed)
    assert C.contains(np.zeros(K.n))
    for v in C.sample(rng, 10):
        for t in (0.1, 2.0, 50.0):
            assert C.contains(t * v, 1e-8 * (1 + t))
