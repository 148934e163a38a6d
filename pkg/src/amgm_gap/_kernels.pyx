# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: batched moment summaries and psi on a shift grid.

Mirrors ``_fallback.py`` line for line.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, log1p, expm1, fabs, sqrt, INFINITY

cnp.import_array()

C_SWITCH = 1e6
cdef double _C_SWITCH = 1e6
cdef double _TOL_GAP = 1e-12
cdef double _LOG1P_CUT = 0.5

MEAN, LOG_MEAN, GAP, V, M_MIN, M_MAX, E, F, MEAN_SQRT = range(9)
N_COLS = 9


cdef inline double _psi_direct(double u, double v, double p, double c) nogil:
    cdef double q = 1.0 - p
    cdef double d = v - u
    cdef double w = u + c
    cdef double eps
    if w <= 0.0:
        return q * d * d
    if d >= w:
        return p * w * w + q * (w + d) * (w + d) - exp(2.0 * p * log(w) + 2.0 * q * log(w + d))
    eps = d / w
    return w * w * (2.0 * q * eps + q * eps * eps - expm1(2.0 * q * log1p(eps)))


cdef inline double _psi_asymptotic(double u, double v, double p, double c) nogil:
    cdef double q = 1.0 - p
    cdef double d = v - u
    cdef double eps = d / (u + c)
    cdef double g = 2.0 * q
    cdef double c3 = g * (g - 1.0) * (g - 2.0) / 6.0
    cdef double c4 = c3 * (g - 3.0) / 4.0
    return d * d * (2.0 * p * q - c3 * eps - c4 * eps * eps)


def psi_direct(double u, double v, double p, double c):
    return _psi_direct(u, v, p, c)


def psi_asymptotic(double u, double v, double p, double c):
    return _psi_asymptotic(u, v, p, c)


def psi_grid(double u, double v, double p, cs):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] flat = np.ascontiguousarray(cs, dtype=np.float64).ravel()
    cdef Py_ssize_t n = flat.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n)
    cdef double switch = _C_SWITCH * (v - u)
    cdef Py_ssize_t i
    with nogil:
        for i in range(n):
            if flat[i] > switch:
                out[i] = _psi_asymptotic(u, v, p, flat[i])
            else:
                out[i] = _psi_direct(u, v, p, flat[i])
    return out.reshape(np.shape(cs))


def batch_summaries(values, probs):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] x = np.ascontiguousarray(values, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] w = np.ascontiguousarray(probs, dtype=np.float64)
    cdef Py_ssize_t n = x.shape[0], k = x.shape[1], i, j
    cdef cnp.ndarray[cnp.float64_t, ndim=2] out = np.empty((n, 9))
    cdef double mean, slog, ms, var, lo, hi, gap, t, r, s1, s2, s3, lmu, res
    cdef bint has_zero
    with nogil:
        for i in range(n):
            mean = 0.0
            slog = 0.0
            ms = 0.0
            lo = INFINITY
            hi = -INFINITY
            has_zero = False
            for j in range(k):
                if w[i, j] > 0.0:
                    mean += w[i, j] * x[i, j]
                    ms += w[i, j] * sqrt(x[i, j])
                    if x[i, j] == 0.0:
                        has_zero = True
                    else:
                        slog += w[i, j] * log(x[i, j])
                    if x[i, j] < lo:
                        lo = x[i, j]
                    if x[i, j] > hi:
                        hi = x[i, j]
            var = 0.0
            for j in range(k):
                if w[i, j] > 0.0:
                    t = sqrt(x[i, j]) - ms
                    var += w[i, j] * t * t
            if has_zero:
                slog = -INFINITY
            out[i, 0] = mean
            out[i, 1] = slog
            out[i, 4] = lo
            out[i, 5] = hi
            if lo == hi:
                out[i, 2] = 0.0
                out[i, 3] = 0.0
                out[i, 6] = 0.0
                out[i, 7] = 0.0
                out[i, 8] = sqrt(lo)
            else:
                # -mean * expm1(E ln(X / mean)), log1p split near the mean
                if has_zero:
                    gap = mean
                else:
                    s1 = 0.0
                    s2 = 0.0
                    s3 = 0.0
                    res = 0.0
                    lmu = log(mean)
                    for j in range(k):
                        if w[i, j] > 0.0:
                            res += w[i, j] * (x[i, j] - mean)
                            r = (x[i, j] - mean) / mean
                            if fabs(r) <= _LOG1P_CUT:
                                s1 += w[i, j] * r
                                s2 += w[i, j] * (log1p(r) - r)
                            else:
                                s3 += w[i, j] * (log(x[i, j]) - lmu)
                    gap = res - mean * expm1(s1 + s2 + s3)
                if gap < 0.0 and gap >= -_TOL_GAP * (mean if mean > 1.0 else 1.0):
                    gap = 0.0
                out[i, 2] = gap
                out[i, 3] = var
                out[i, 6] = var + (ms - sqrt(lo)) * (ms - sqrt(lo))
                out[i, 7] = var + (sqrt(hi) - ms) * (sqrt(hi) - ms)
                out[i, 8] = ms
    return out
