"""Two-point laws that attain the bounds, and the F = inf mixture family.

For ``Y`` taking ``u`` with probability ``p`` and ``v`` with ``q = 1 - p``,
``X = Y**2`` has ``V = p q (v-u)**2``, ``E = q (v-u)**2`` and
``F = p (v-u)**2``. Shifting both points by ``c`` leaves all three alone
and moves the gap along

    psi(c) = p (u+c)**2 + q (v+c)**2 - (u+c)**(2p) (v+c)**(2q)

which is monotone on ``[-u, inf)`` from ``q (v-u)**2`` to ``2 p q (v-u)**2``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .bounds import InadmissiblePair, lower_bound, upper_bound
from .core import DiscreteDistribution, make_distribution

C_SWITCH = kernels.C_SWITCH


class ShiftOutOfRange(ValueError):
    pass


class InadmissibleParams(ValueError):
    pass


@dataclass(frozen=True)
class TwoPointSpec:
    u: float
    v: float
    p: float

    def __post_init__(self):
        if not (0.0 <= self.u < self.v and math.isfinite(self.v)):
            raise ValueError(f"need 0 <= u < v < inf, got u={self.u!r}, v={self.v!r}")
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"need 0 < p < 1, got {self.p!r}")

    @property
    def q(self) -> float:
        return 1.0 - self.p

    @property
    def width(self) -> float:
        return self.v - self.u

    @property
    def V(self) -> float:
        return self.p * self.q * self.width**2

    @property
    def E(self) -> float:
        return self.q * self.width**2

    @property
    def F(self) -> float:
        return self.p * self.width**2

    def to_dict(self) -> dict:
        return {"u": self.u, "v": self.v, "p": self.p}


@dataclass(frozen=True)
class MixtureSpec:
    """``X = (V/eps) U**2`` where U is 0 w.p. 1-eps, 1 w.p. eps-eps**2,
    and Exp(1) w.p. eps**2."""

    V: float
    eps: float

    def __post_init__(self):
        if not (self.V > 0 and math.isfinite(self.V)):
            raise InadmissibleParams(f"need V > 0, got {self.V!r}")
        if not 0.0 < self.eps < 1.0:
            raise InadmissibleParams(f"need 0 < eps < 1, got {self.eps!r}")

    @property
    def scale(self) -> float:
        return self.V / self.eps

    @property
    def mean_u(self) -> float:
        return self.eps

    @property
    def var_u(self) -> float:
        # E U^2 = (eps - eps^2) * 1 + eps^2 * 2
        return self.eps + self.eps**2 - self.mean_u**2

    @property
    def target_E(self) -> float:
        return (1.0 + self.eps) * self.V


def two_point_hi(V: float, E: float, u: float = 0.0) -> TwoPointSpec:
    """Two-point sqrt-law with the given (V, E), lower point at ``u``."""
    if not E > V > 0 or not math.isfinite(E):
        raise InadmissiblePair(f"(V, E) = ({V!r}, {E!r}): an extremal law needs E > V > 0")
    if not u >= 0:
        raise ValueError(f"need u >= 0, got {u!r}")
    return TwoPointSpec(u, u + E / math.sqrt(E - V), V / E)


def two_point_lo(V: float, F: float, u: float = 0.0) -> TwoPointSpec:
    """Two-point sqrt-law with the given (V, F), lower point at ``u``.

    Its E equals ``E_VF``. There is no such law for ``F = inf``.
    """
    if F == math.inf:
        raise InadmissiblePair(f"(V, F) = ({V!r}, inf): the infimum over F = inf is not attained")
    if not F > V > 0:
        raise InadmissiblePair(f"(V, F) = ({V!r}, {F!r}): an extremal law needs F > V > 0")
    if not u >= 0:
        raise ValueError(f"need u >= 0, got {u!r}")
    return TwoPointSpec(u, u + F / math.sqrt(F - V), 1.0 - V / F)


def _check_shift(s: TwoPointSpec, c: float) -> None:
    if not c >= -s.u or not math.isfinite(c):
        raise ShiftOutOfRange(f"shift c={c!r} must satisfy c >= -u = {-s.u!r}")


def spec_to_distribution(s: TwoPointSpec, c: float = 0.0) -> DiscreteDistribution:
    _check_shift(s, c)
    lo = 0.0 if c == -s.u else (s.u + c) ** 2
    return make_distribution([(lo, s.p), ((s.v + c) ** 2, s.q)])


def psi(s: TwoPointSpec, c: float) -> float:
    """Gap of the law shifted by ``c``, evaluated without cancellation."""
    _check_shift(s, c)
    return float(kernels.psi_grid(s.u, s.v, s.p, np.array([c], dtype=float))[0])


def psi_direct(s: TwoPointSpec, c: float) -> float:
    """Closed-form branch only, at any c (loses accuracy far past the switch)."""
    _check_shift(s, c)
    return kernels.psi_direct(s.u, s.v, s.p, c)


def psi_asymptotic(s: TwoPointSpec, c: float) -> float:
    """Series branch only; accurate for ``c >> v - u``."""
    _check_shift(s, c)
    return kernels.psi_asymptotic(s.u, s.v, s.p, c)


def psi_limit(s: TwoPointSpec) -> float:
    return 2.0 * s.p * s.q * s.width**2


def psi_extremum_hi(V: float, E: float) -> float:
    s = two_point_hi(V, E)
    # psi is monotone, so its sup sits at an end of [-u, inf).
    return max(psi(s, -s.u), psi_limit(s))


def psi_extremum_lo(V: float, F: float) -> float:
    s = two_point_lo(V, F)
    return min(psi(s, -s.u), psi_limit(s))


def mixture_members(V: float, eps: float, n_quad: int = 64) -> DiscreteDistribution:
    """Discretize ``X_eps`` with Gauss-Laguerre nodes for the exponential part.

    The quadrature is exact for polynomials of degree < 2 n_quad, so the
    first two moments of ``U`` (and hence V and E of X) are reproduced up
    to rounding.
    """
    spec = MixtureSpec(V, eps)
    if n_quad < 16:
        raise InadmissibleParams(f"n_quad must be >= 16, got {n_quad}")
    nodes, weights = np.polynomial.laguerre.laggauss(n_quad)
    pairs = [(0.0, 1.0 - eps), (spec.scale, eps - eps**2)]
    pairs += [(spec.scale * x * x, eps**2 * w) for x, w in zip(nodes, weights) if w > 0]
    return make_distribution(pairs)


def attaining_bound(side: str, V: float, param: float) -> float:
    """The exact bound the extremal family for ``side`` converges to."""
    if side == "hi":
        return upper_bound(V, param)
    if side == "lo":
        return lower_bound(V, param)
    raise ValueError(f"side must be 'hi' or 'lo', got {side!r}")

