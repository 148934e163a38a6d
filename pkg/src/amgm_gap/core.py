"""Discrete distributions on [0, inf) and the statistics the gap bounds are built from.

A distribution is a finite set of atoms ``(x, p)``. For ``Y = sqrt(X)``::

    V = Var Y
    E = E (Y - sqrt(m))^2        m = min supp X
    F = E (sqrt(M) - Y)^2        M = max supp X
    gap = E X - exp(E ln X)      with ln 0 = -inf, exp(-inf) = 0
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

TOL_P = 1e-12
TOL_GAP = 1e-12
# |x / mean - 1| below this takes the log1p path in amgm_gap
LOG1P_CUT = 0.5


class DistributionError(ValueError):
    """Base class for rejected distribution input."""


class EmptySupport(DistributionError):
    pass


class NegativeValue(DistributionError):
    pass


class NegativeProbability(DistributionError):
    pass


class ProbSumOutOfTolerance(DistributionError):
    pass


@dataclass(frozen=True)
class DiscreteDistribution:
    """Finitely many nonnegative atoms, sorted ascending, distinct values.

    Build instances with :func:`make_distribution` or
    :func:`uniform_from_values`; the constructor trusts its input.
    """

    atoms: tuple[tuple[float, float], ...]

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(x for x, _ in self.atoms)

    @property
    def probs(self) -> tuple[float, ...]:
        return tuple(p for _, p in self.atoms)

    def __len__(self) -> int:
        return len(self.atoms)

    def scaled(self, s: float) -> "DiscreteDistribution":
        return make_distribution([(s * x, p) for x, p in self.atoms])

    def to_dict(self) -> dict:
        return {"atoms": [{"x": x, "p": p} for x, p in self.atoms]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


@dataclass(frozen=True)
class MomentSummary:
    mean: float
    log_mean: float
    gap: float
    V: float
    m: float
    M: float
    E: float
    F: float
    mean_sqrt: float

    def to_dict(self) -> dict:
        return {
            "mean": self.mean,
            "log_mean": self.log_mean,
            "gap": self.gap,
            "V": self.V,
            "m": self.m,
            "M": self.M,
            "E": self.E,
            "F": self.F,
        }


def make_distribution(pairs: Iterable[Sequence[float]]) -> DiscreteDistribution:
    """Validate, merge equal values, and normalize ``(value, prob)`` pairs.

    Zero-probability pairs are dropped. Values are merged on exact equality
    only. The probabilities must already sum to 1 within ``TOL_P``; they are
    then renormalized so the stored sum is 1 up to rounding.
    """
    merged: dict[float, float] = {}
    n_pairs = 0
    for i, pair in enumerate(pairs):
        x, p = float(pair[0]), float(pair[1])
        n_pairs += 1
        if not math.isfinite(x) or x < 0:
            raise NegativeValue(f"atom {i}: value {x!r} is not a finite nonnegative number")
        if not math.isfinite(p) or p < 0:
            raise NegativeProbability(f"atom {i}: probability {p!r} is not a finite nonnegative number")
        if p == 0.0:
            continue
        merged[x] = merged.get(x, 0.0) + p
    if not merged:
        what = "no atoms given" if n_pairs == 0 else "all probabilities are zero"
        raise EmptySupport(what)
    total = math.fsum(merged.values())
    if abs(total - 1.0) > TOL_P:
        raise ProbSumOutOfTolerance(f"probabilities sum to {total!r}, not 1 within {TOL_P}")
    atoms = tuple((x, merged[x] / total) for x in sorted(merged))
    return DiscreteDistribution(atoms)


def uniform_from_values(values: Iterable[float]) -> DiscreteDistribution:
    """Equal weight 1/n on each entry of ``values`` (repeats accumulate)."""
    vals = [float(v) for v in values]
    if not vals:
        raise EmptySupport("no values given")
    n = len(vals)
    counts: dict[float, int] = {}
    for i, x in enumerate(vals):
        if not math.isfinite(x) or x < 0:
            raise NegativeValue(f"value {i}: {x!r} is not a finite nonnegative number")
        counts[x] = counts.get(x, 0) + 1
    return DiscreteDistribution(tuple((x, counts[x] / n) for x in sorted(counts)))


def from_dict(obj) -> DiscreteDistribution:
    """Parse ``{"atoms": [{"x":..., "p":...}, ...]}`` or a bare list of values."""
    if isinstance(obj, list):
        return uniform_from_values(obj)
    if not isinstance(obj, dict) or "atoms" not in obj:
        raise DistributionError('expected {"atoms": [...]} or an array of numbers')
    pairs = []
    for i, atom in enumerate(obj["atoms"]):
        try:
            pairs.append((atom["x"], atom["p"]))
        except (KeyError, TypeError):
            raise DistributionError(f'atom {i}: expected an object with "x" and "p", got {atom!r}') from None
    return make_distribution(pairs)


def mean(d: DiscreteDistribution) -> float:
    return math.fsum(p * x for x, p in d.atoms)


def log_mean(d: DiscreteDistribution) -> float:
    if d.atoms[0][0] == 0.0:
        return -math.inf
    return math.fsum(p * math.log(x) for x, p in d.atoms)


def geometric_mean(d: DiscreteDistribution) -> float:
    return math.exp(log_mean(d))


def amgm_gap(d: DiscreteDistribution) -> float:
    """``E X - exp(E ln X)``; never negative beyond rounding."""
    if len(d.atoms) == 1:
        return 0.0
    mu = mean(d)
    if d.atoms[0][0] == 0.0:
        return mu
    # mu - exp(E ln X) = -mu * expm1(E ln(X / mu)). Near the mean, ln(x / mu)
    # is split as r + (log1p(r) - r): the r terms cancel in an exact sum
    # instead of in the final subtraction.
    lmu = math.log(mu)
    terms = []
    for x, p in d.atoms:
        r = (x - mu) / mu
        if abs(r) <= LOG1P_CUT:
            terms += [p * r, p * (math.log1p(r) - r)]
        else:
            terms.append(p * (math.log(x) - lmu))
    # mu is the rounded mean; add back its residual or it lands in the gap
    resid = math.fsum(p * (x - mu) for x, p in d.atoms)
    gap = resid - mu * math.expm1(math.fsum(terms))
    # Jensen: negatives here are rounding.
    if -TOL_GAP * max(1.0, mu) <= gap < 0.0:
        return 0.0
    return gap


def sqrt_moments(d: DiscreteDistribution) -> MomentSummary:
    m, M = d.atoms[0][0], d.atoms[-1][0]
    mu = mean(d)
    if len(d.atoms) == 1:
        return MomentSummary(mu, log_mean(d), 0.0, 0.0, m, M, 0.0, 0.0, math.sqrt(m))
    mean_sqrt = math.fsum(p * math.sqrt(x) for x, p in d.atoms)
    V = math.fsum(p * (math.sqrt(x) - mean_sqrt) ** 2 for x, p in d.atoms)
    # E and F via V plus a square keeps E >= V and F >= V exact in floats.
    E = V + (mean_sqrt - math.sqrt(m)) ** 2
    F = V + (math.sqrt(M) - mean_sqrt) ** 2
    return MomentSummary(mu, log_mean(d), amgm_gap(d), V, m, M, E, F, mean_sqrt)
