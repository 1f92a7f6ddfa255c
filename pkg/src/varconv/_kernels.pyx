# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled pair kernels used by the brute-force oracles.

Semantics must match ``_kernels_py`` exactly, including tie-breaking: the
first minimizer in row-major (i, j) order wins.
"""
import numpy as np

from libc.math cimport INFINITY, isfinite


def monotone_pairs(const double[:, ::1] X, const double[:, ::1] XS, double s):
    """Minimum of <y*-x*, y-x> - s|y-x|^2 over all pairs i < j.

    Returns (norm_min, ni, nj, raw_min, ri, rj); the normalized margin divides
    by |y-x|^2 and skips pairs with equal base points.
    """
    cdef Py_ssize_t N = X.shape[0], n = X.shape[1]
    cdef Py_ssize_t i, j, k
    cdef Py_ssize_t ni = -1, nj = -1, ri = -1, rj = -1
    cdef double norm_min = INFINITY, raw_min = INFINITY
    cdef double dot, dd, d, raw, m
    for i in range(N):
        for j in range(i + 1, N):
            dot = 0.0
            dd = 0.0
            for k in range(n):
                d = X[j, k] - X[i, k]
                dot += (XS[j, k] - XS[i, k]) * d
                dd += d * d
            raw = dot - s * dd
            if raw < raw_min:
                raw_min = raw
                ri = i
                rj = j
            if dd > 0.0:
                m = raw / dd
                if m < norm_min:
                    norm_min = m
                    ni = i
                    nj = j
    return norm_min, ni, nj, raw_min, ri, rj


def growth_pairs(const double[:, ::1] XP, const double[:] FP,
                 const double[:, ::1] X, const double[:, ::1] XS,
                 const double[:] F, double s):
    """Minimum of f(x') - f(x) - <x*, x'-x> - (s/2)|x'-x|^2.

    Rows of XP are test points x' with values FP (non-finite values are
    skipped); rows of (X, XS, F) are graph points. Returns
    (norm_min, p, g, raw_min, rp, rg).
    """
    cdef Py_ssize_t M = XP.shape[0], N = X.shape[0], n = X.shape[1]
    cdef Py_ssize_t p, g, k
    cdef Py_ssize_t np_ = -1, ng = -1, rp = -1, rg = -1
    cdef double norm_min = INFINITY, raw_min = INFINITY
    cdef double lin, dd, d, raw, m, fp
    for p in range(M):
        fp = FP[p]
        if not isfinite(fp):
            continue
        for g in range(N):
            lin = 0.0
            dd = 0.0
            for k in range(n):
                d = XP[p, k] - X[g, k]
                lin += XS[g, k] * d
                dd += d * d
            raw = fp - F[g] - lin - 0.5 * s * dd
            if raw < raw_min:
                raw_min = raw
                rp = p
                rg = g
            if dd > 0.0:
                m = raw / dd
                if m < norm_min:
                    norm_min = m
                    np_ = p
                    ng = g
    return norm_min, np_, ng, raw_min, rp, rg


def affine_max(const double[:, ::1] XP, const double[:, ::1] X,
               const double[:, ::1] XS, const double[:] F):
    """Evaluate max_g F[g] + <XS[g], x' - X[g]> at every row x' of XP."""
    cdef Py_ssize_t M = XP.shape[0], N = X.shape[0], n = X.shape[1]
    cdef Py_ssize_t p, g, k
    cdef double best, val
    out = np.empty(M, dtype=np.float64)
    cdef double[::1] o = out
    for p in range(M):
        best = -INFINITY
        for g in range(N):
            val = F[g]
            for k in range(n):
                val += XS[g, k] * (XP[p, k] - X[g, k])
            if val > best:
                best = val
        o[p] = best
    return out
