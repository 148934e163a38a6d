"""Pure-Python/numpy versions of the hot kernels.

Used when the compiled extension is unavailable or ``AMGM_GAP_PURE=1``.
Semantics must match ``_kernels.pyx`` exactly; tests run both.
"""
from __future__ import annotations

import math

import numpy as np

C_SWITCH = 1e6
TOL_GAP = 1e-12
LOG1P_CUT = 0.5

# batch_summaries column layout
MEAN, LOG_MEAN, GAP, V, M_MIN, M_MAX, E, F, MEAN_SQRT = range(9)
N_COLS = 9


def psi_direct(u: float, v: float, p: float, c: float) -> float:
    q = 1.0 - p
    d = v - u
    w = u + c
    if w <= 0.0:
        return q * d * d
    if d >= w:
        return p * w * w + q * (w + d) ** 2 - math.exp(2.0 * p * math.log(w) + 2.0 * q * math.log(w + d))
    # w^2 [1 + 2q eps + q eps^2 - (1 + eps)^(2q)], the leading 1 cancelled exactly
    eps = d / w
    return w * w * (2.0 * q * eps + q * eps * eps - math.expm1(2.0 * q * math.log1p(eps)))


def psi_asymptotic(u: float, v: float, p: float, c: float) -> float:
    q = 1.0 - p
    d = v - u
    eps = d / (u + c)
    g = 2.0 * q
    c3 = g * (g - 1.0) * (g - 2.0) / 6.0
    c4 = c3 * (g - 3.0) / 4.0
    return d * d * (2.0 * p * q - c3 * eps - c4 * eps * eps)


def psi_grid(u: float, v: float, p: float, cs: np.ndarray) -> np.ndarray:
    cs = np.asarray(cs, dtype=float)
    switch = C_SWITCH * (v - u)
    return np.array(
        [psi_asymptotic(u, v, p, c) if c > switch else psi_direct(u, v, p, c) for c in cs.ravel()],
        dtype=float,
    ).reshape(cs.shape)


def batch_summaries(values: np.ndarray, probs: np.ndarray) -> np.ndarray:
    """Row-wise moment summaries of padded atom arrays.

    Entries with ``prob == 0`` are padding. Returns an ``(n, N_COLS)``
    array indexed by the module-level column constants.
    """
    x = np.asarray(values, dtype=float)
    w = np.asarray(probs, dtype=float)
    live = w > 0
    out = np.empty((x.shape[0], N_COLS))

    mean = np.sum(w * x, axis=1)
    has_zero = np.any(live & (x == 0.0), axis=1)
    logx = np.log(np.where(live & (x > 0.0), x, 1.0))
    log_mean = np.where(has_zero, -np.inf, np.sum(w * logx, axis=1))
    # same split as core.amgm_gap: -mean * expm1(E ln(X / mean))
    mu = np.where(mean > 0.0, mean, 1.0)[:, None]
    r = (x - mu) / mu
    near = np.abs(r) <= LOG1P_CUT
    rs = np.where(near, r, 0.0)
    lx = np.where(live & ~near & (x > 0.0), np.log(np.where(x > 0.0, x, 1.0)) - np.log(mu), 0.0)
    slog = np.sum(w * rs, axis=1) + np.sum(w * (np.log1p(rs) - rs), axis=1) + np.sum(w * lx, axis=1)
    resid = np.sum(np.where(live, w * (x - mu), 0.0), axis=1)
    gap = np.where(has_zero, mean, resid - mean * np.expm1(slog))
    gap = np.where((gap < 0.0) & (gap >= -TOL_GAP * np.maximum(1.0, mean)), 0.0, gap)

    sq = np.sqrt(x)
    ms = np.sum(w * sq, axis=1)
    var = np.sum(w * (sq - ms[:, None]) ** 2, axis=1)
    lo = np.min(np.where(live, x, np.inf), axis=1)
    hi = np.max(np.where(live, x, -np.inf), axis=1)
    e = var + (ms - np.sqrt(lo)) ** 2
    f = var + (np.sqrt(hi) - ms) ** 2

    single = lo == hi
    out[:, MEAN] = mean
    out[:, LOG_MEAN] = log_mean
    out[:, GAP] = np.where(single, 0.0, gap)
    out[:, V] = np.where(single, 0.0, var)
    out[:, M_MIN] = lo
    out[:, M_MAX] = hi
    out[:, E] = np.where(single, 0.0, e)
    out[:, F] = np.where(single, 0.0, f)
    out[:, MEAN_SQRT] = np.where(single, np.sqrt(lo), ms)
    return out
