# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled batched polynomial kernels.

Same signatures and semantics as ``polyvi._kernels_py``.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef void _fill_powers(const double[:, ::1] X, Py_ssize_t b, Py_ssize_t d,
                       double[:, ::1] pw) noexcept nogil:
    cdef Py_ssize_t j, k
    for j in range(X.shape[1]):
        pw[j, 0] = 1.0
        for k in range(1, d + 1):
            pw[j, k] = pw[j, k - 1] * X[b, j]


def monomials(exps_in, X_in):
    cdef const long long[:, ::1] exps = np.ascontiguousarray(exps_in, dtype=np.int64)
    cdef const double[:, ::1] X = np.ascontiguousarray(X_in, dtype=np.float64)
    cdef Py_ssize_t B = X.shape[0], n = X.shape[1], m = exps.shape[0]
    cdef Py_ssize_t d = int(np.max(exps_in)) if m and n else 0
    out_arr = np.empty((B, m))
    cdef double[:, ::1] out = out_arr
    cdef double[:, ::1] pw = np.empty((n, d + 1))
    cdef Py_ssize_t b, i, j
    cdef double v
    with nogil:
        for b in range(B):
            _fill_powers(X, b, d, pw)
            for i in range(m):
                v = 1.0
                for j in range(n):
                    v = v * pw[j, exps[i, j]]
                out[b, i] = v
    return out_arr


def poly_eval(exps_in, coeffs_in, X_in):
    cdef const long long[:, ::1] exps = np.ascontiguousarray(exps_in, dtype=np.int64)
    cdef const double[:, ::1] A = np.ascontiguousarray(coeffs_in, dtype=np.float64)
    cdef const double[:, ::1] X = np.ascontiguousarray(X_in, dtype=np.float64)
    cdef Py_ssize_t B = X.shape[0], n = X.shape[1], m = exps.shape[0]
    cdef Py_ssize_t n_out = A.shape[0]
    cdef Py_ssize_t d = int(np.max(exps_in)) if m and n else 0
    out_arr = np.zeros((B, n_out))
    cdef double[:, ::1] out = out_arr
    cdef double[:, ::1] pw = np.empty((n, d + 1))
    cdef Py_ssize_t b, i, j, l
    cdef double v
    with nogil:
        for b in range(B):
            _fill_powers(X, b, d, pw)
            for i in range(m):
                v = 1.0
                for j in range(n):
                    v = v * pw[j, exps[i, j]]
                for l in range(n_out):
                    out[b, l] += A[l, i] * v
    return out_arr


def poly_jac(exps_in, coeffs_in, X_in):
    cdef const long long[:, ::1] exps = np.ascontiguousarray(exps_in, dtype=np.int64)
    cdef const double[:, ::1] A = np.ascontiguousarray(coeffs_in, dtype=np.float64)
    cdef const double[:, ::1] X = np.ascontiguousarray(X_in, dtype=np.float64)
    cdef Py_ssize_t B = X.shape[0], n = X.shape[1], m = exps.shape[0]
    cdef Py_ssize_t n_out = A.shape[0]
    cdef Py_ssize_t d = int(np.max(exps_in)) if m and n else 0
    out_arr = np.zeros((B, n_out, n))
    cdef double[:, :, ::1] out = out_arr
    cdef double[:, ::1] pw = np.empty((n, d + 1))
    cdef Py_ssize_t b, i, j, k, l
    cdef long long a
    cdef double v
    with nogil:
        for b in range(B):
            _fill_powers(X, b, d, pw)
            for i in range(m):
                for j in range(n):
                    a = exps[i, j]
                    if a == 0:
                        continue
                    v = <double>a * pw[j, a - 1]
                    for k in range(n):
                        if k != j:
                            v = v * pw[k, exps[i, k]]
                    for l in range(n_out):
                        out[b, l, j] += A[l, i] * v
    return out_arr
