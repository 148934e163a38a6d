"""Exact two-sided bounds on the AM-GM gap.

For any nonnegative X with finite mean::

    min(2V, E_VF) <= E X - exp(E ln X) <= max(2V, E)

where ``E_VF = F V / (F - V)``, read as ``V`` when ``F = inf`` and as ``0``
when ``F = V``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .core import DiscreteDistribution, MomentSummary, sqrt_moments

INF = math.inf
EQUAL_WEIGHT_TOL = 1e-12


class InadmissiblePair(ValueError):
    """(V, E) or (V, F) is not realized by any nonnegative random variable."""


class SandwichViolation(AssertionError):
    def __init__(self, message: str, summary: MomentSummary, result: "BoundResult"):
        super().__init__(message)
        self.summary = summary
        self.result = result


@dataclass(frozen=True)
class BoundResult:
    upper: float
    lower: float
    e_vf: float
    gap: float
    admissible_hi: bool
    admissible_lo: bool
    equality_case: bool

    def to_dict(self) -> dict:
        return {
            "upper": self.upper,
            "lower": self.lower,
            "e_vf": self.e_vf,
            "gap": self.gap,
            "admissible_hi": self.admissible_hi,
            "admissible_lo": self.admissible_lo,
            "equality_case": self.equality_case,
        }


def admissible_hi(V: float, E: float) -> bool:
    return (V == 0 and E == 0) or (E > V > 0)


def admissible_lo(V: float, F: float) -> bool:
    return (V == 0 and F == 0) or (F > V > 0)


def _require_hi(V: float, E: float) -> None:
    if not admissible_hi(V, E):
        raise InadmissiblePair(f"(V, E) = ({V!r}, {E!r}) needs either E = V = 0 or E > V > 0")


def _require_lo(V: float, F: float) -> None:
    if not admissible_lo(V, F):
        raise InadmissiblePair(f"(V, F) = ({V!r}, {F!r}) needs either F = V = 0 or F > V > 0")


def _e_vf_unchecked(V: float, F: float) -> float:
    if F == INF:
        return V
    if F == V:
        return 0.0
    # F / (F - V) >= 1, so this cannot underflow the way F * V can
    return F / (F - V) * V


def e_vf(V: float, F: float) -> float:
    """Infimum of E over laws with the given V and F."""
    _require_lo(V, F)
    return _e_vf_unchecked(V, F)


def upper_bound(V: float, E: float) -> float:
    _require_hi(V, E)
    return max(2.0 * V, E)


def lower_bound(V: float, F: float) -> float:
    _require_lo(V, F)
    return min(2.0 * V, _e_vf_unchecked(V, F))


def is_equality_case(d: DiscreteDistribution) -> bool:
    """True iff sqrt(X) is symmetric on at most two points."""
    if len(d.atoms) == 1:
        return True
    if len(d.atoms) == 2:
        return all(abs(p - 0.5) <= EQUAL_WEIGHT_TOL for _, p in d.atoms)
    return False


def bounds_from_summary(s: MomentSummary, equality_case: bool = False) -> BoundResult:
    """Fill a BoundResult without enforcing admissibility.

    Summaries computed in floating point can land a hair outside the
    admissible set; the formulas are still evaluated with the E_VF
    conventions so the output shape is uniform.
    """
    evf = _e_vf_unchecked(s.V, s.F)
    return BoundResult(
        upper=max(2.0 * s.V, s.E),
        lower=min(2.0 * s.V, evf),
        e_vf=evf,
        gap=s.gap,
        admissible_hi=admissible_hi(s.V, s.E),
        admissible_lo=admissible_lo(s.V, s.F),
        equality_case=equality_case,
    )


def sandwich_tolerance(mean: float) -> float:
    return 1e-9 * max(1.0, mean)


def evaluate(d: DiscreteDistribution) -> tuple[MomentSummary, BoundResult]:
    """Summary and bounds for ``d``; raises :class:`SandwichViolation` if
    the bounds fail to enclose the gap, which can only mean a defect here.
    """
    s = sqrt_moments(d)
    r = bounds_from_summary(s, is_equality_case(d))
    tol = sandwich_tolerance(s.mean)
    if not (r.lower - tol <= s.gap <= r.upper + tol):
        raise SandwichViolation(
            f"gap {s.gap!r} outside [{r.lower!r}, {r.upper!r}] for {d.to_json()}", s, r
        )
    return s, r


def check_bounds(d: DiscreteDistribution) -> BoundResult:
    return evaluate(d)[1]
