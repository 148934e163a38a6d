"""Hot-kernel dispatch: compiled extension when importable, else numpy/Python.

Set ``AMGM_GAP_PURE=1`` to force the fallback.
"""
from __future__ import annotations

import os

from . import _fallback

BACKEND = "python"

if os.environ.get("AMGM_GAP_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _fallback
else:
    _impl = _fallback

C_SWITCH = _fallback.C_SWITCH
MEAN, LOG_MEAN, GAP, V, M_MIN, M_MAX, E, F, MEAN_SQRT = range(9)
N_COLS = _fallback.N_COLS

psi_direct = _impl.psi_direct
psi_asymptotic = _impl.psi_asymptotic
psi_grid = _impl.psi_grid
batch_summaries = _impl.batch_summaries


def backends() -> dict:
    """All importable backends by name (used by tests and the benchmark)."""
    out = {"python": _fallback}
    try:
        from . import _kernels

        out["cython"] = _kernels
    except ImportError:
        pass
    return out
