# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the dense kernels; see ``_kernels_py`` for the contract."""

import numpy as np

cdef extern from "complex.h" nogil:
    double complex conj(double complex)

cdef double complex _C = 1.0 / (2j * np.pi)


def ks_matrix(z, T, w):
    cdef const double complex[::1] zv = np.ascontiguousarray(z, dtype=complex)
    cdef const double complex[::1] Tv = np.ascontiguousarray(T, dtype=complex)
    cdef const double[::1] wv = np.ascontiguousarray(w, dtype=float)
    cdef Py_ssize_t n = zv.shape[0], j, k
    out = np.zeros((n, n), dtype=complex)
    cdef double complex[:, ::1] A = out
    cdef double complex d, cTj
    with nogil:
        for j in range(n):
            cTj = conj(Tv[j])
            for k in range(n):
                if k == j:
                    continue
                d = zv[k] - zv[j]
                A[j, k] = _C * (Tv[k] / d - cTj / conj(d)) * wv[k]
    return out


def cauchy_sum(F, zk, zw, targets, int order):
    cdef const double complex[:, ::1] Fv = np.ascontiguousarray(np.atleast_2d(F).T, dtype=complex)
    cdef const double complex[::1] zkv = np.ascontiguousarray(zk, dtype=complex)
    cdef const double complex[::1] zwv = np.ascontiguousarray(zw, dtype=complex)
    cdef const double complex[::1] xv = np.ascontiguousarray(targets, dtype=complex)
    cdef Py_ssize_t m = Fv.shape[1], K = zkv.shape[0], P = xv.shape[0], i, k, p
    out = np.zeros((P, m), dtype=complex)
    cdef double complex[:, ::1] res = out
    cdef double complex d, r
    cdef double inv
    with nogil:
        for p in range(P):
            for k in range(K):
                d = zkv[k] - xv[p]
                # conj(d) / |d|^2 avoids the guarded complex division
                inv = 1.0 / (d.real * d.real + d.imag * d.imag)
                r = zwv[k] * conj(d) * inv
                if order == 1:
                    r = r * conj(d) * inv
                for i in range(m):
                    res[p, i] = res[p, i] + Fv[k, i] * r
            for i in range(m):
                res[p, i] = res[p, i] * _C
    return out.T
