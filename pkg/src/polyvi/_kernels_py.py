"""Pure NumPy versions of the batched polynomial kernels.

These are the reference implementations; ``_kernels.pyx`` mirrors them
loop-for-loop and must return identical arrays (up to rounding order).
"""

import numpy as np


def _power_table(X, d):
    # pw[b, j, k] = X[b, j] ** k, built by repeated multiplication so the
    # result does not depend on libm pow()
    B, n = X.shape
    pw = np.empty((B, n, d + 1))
    pw[:, :, 0] = 1.0
    for k in range(1, d + 1):
        pw[:, :, k] = pw[:, :, k - 1] * X
    return pw


def monomials(exps, X):
    """Evaluate every monomial of ``exps`` (m x n) at each row of ``X``."""
    exps = np.asarray(exps, dtype=np.int64)
    X = np.ascontiguousarray(X, dtype=np.float64)
    d = int(exps.max()) if exps.size else 0
    pw = _power_table(X, d)
    out = np.ones((X.shape[0], exps.shape[0]))
    for j in range(exps.shape[1]):
        out *= pw[:, j, exps[:, j]]
    return out


def poly_eval(exps, coeffs, X):
    """Return ``monomials(exps, X) @ coeffs.T`` with shape (B, n_out)."""
    return monomials(exps, X) @ np.asarray(coeffs, dtype=np.float64).T


def poly_jac(exps, coeffs, X):
    """Batched Jacobian, shape (B, n_out, n)."""
    exps = np.asarray(exps, dtype=np.int64)
    coeffs = np.asarray(coeffs, dtype=np.float64)
    X = np.ascontiguousarray(X, dtype=np.float64)
    B, n = X.shape
    d = int(exps.max()) if exps.size else 0
    pw = _power_table(X, d)
    # factors[b, i, j] = X[b, j] ** exps[i, j]
    factors = np.empty((B, exps.shape[0], n))
    for j in range(n):
        factors[:, :, j] = pw[:, j, exps[:, j]]
    jac = np.empty((B, coeffs.shape[0], n))
    for j in range(n):
        a = exps[:, j]
        dm = a * pw[:, j, np.maximum(a - 1, 0)]
        for i in range(n):
            if i != j:
                dm = dm * factors[:, :, i]
        jac[:, :, j] = dm @ coeffs.T
    return jac
