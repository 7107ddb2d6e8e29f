"""Independent reference solvers used by the tests."""

import itertools

import numpy as np


def lcp_brute_force(M, q, tol=1e-10):
    """All solutions of LCP(M, q) by enumerating complementary bases."""
    n = len(q)
    sols = []
    for k in range(n + 1):
        for S in itertools.combinations(range(n), k):
            S = list(S)
            x = np.zeros(n)
            if S:
                A = M[np.ix_(S, S)]
                if abs(np.linalg.det(A)) < 1e-12:
                    continue
                x[S] = np.linalg.solve(A, -q[S])
            w = M @ x + q
            if np.all(x >= -tol) and np.all(w >= -tol):
                if all(np.linalg.norm(x - s) > 1e-8 for s in sols):
                    sols.append(x)
    return sols


def grid_vi_solutions(K, F, lo=0.0, hi=3.0, step=1e-2, tol=1e-9):
    """Grid points x of K ∩ [lo, hi]^2 with min over K of <F(x), y - x> >= -tol.

    The minimum is read off the generators of K: rays and lineality must not
    give descent, then the vertex minimum decides.
    """
    m = int(round((hi - lo) / step))
    ticks = lo + np.arange(m + 1) / (m / (hi - lo))
    X = np.array([[a, b] for a in ticks for b in ticks])
    X = X[np.all(X @ K.C.T <= K.b + 1e-12, axis=1)] if K.s else X
    V = F.eval(X)
    gens = K.generators()
    ok = np.ones(len(X), dtype=bool)
    for r in gens.rays:
        ok &= V @ r >= -tol
    for l in gens.lineality:
        ok &= np.abs(V @ l) <= tol
    vmin = (V @ gens.vertices.T).min(axis=1)
    ok &= vmin - np.einsum("ij,ij->i", V, X) >= -tol
    return X[ok]


def within(A, B, radius):
    """Every row of A lies within ``radius`` of some row of B."""
    if len(A) == 0:
        return True
    if len(B) == 0:
        return False
    D = np.linalg.norm(A[:, None, :] - B[None, :, :], axis=2)
    return bool(np.all(D.min(axis=1) <= radius))
