"""Falsification campaigns: every claimed inequality checked by brute force.

Each trial ``i`` of a campaign draws from its own counter-based stream
keyed on ``(seed, i)``, so a report depends only on the config, never on
chunking or worker count. Per-trial results are reduced to a signed
margin (positive = violation); a campaign fails iff any margin is > 0.
"""
from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import kernels
from .bounds import (
    InadmissiblePair,
    admissible_hi,
    admissible_lo,
    e_vf,
    is_equality_case,
    lower_bound,
    upper_bound,
)
from .core import DiscreteDistribution, make_distribution, sqrt_moments
from .extremal import (
    mixture_members,
    spec_to_distribution,
    two_point_hi,
    two_point_lo,
)

GENERATOR = f"numpy.random.Philox(key=seed + (trial << 64)) numpy=={np.__version__}"

SANDWICH_TOL = 1e-9
EQUALITY_TOL = 1e-10
SLACK_FLOOR = 1e-12
LEMMA_VAR_TOL = 1e-12
LEMMA_VAR_EQ_TOL = 1e-10
PROP2_TOL = 1e-9
PROP2_STRICT = 1e-12
MIXTURE_TOL = 1e-6
ATTAIN_TOL = 1e-6
MIXTURE_EPS = (0.1, 0.01, 0.001)
CHUNK = 8192


class InvalidConfig(ValueError):
    pass


@dataclass(frozen=True)
class CampaignConfig:
    trials: int
    max_atoms: int = 8
    value_cap: float = 100.0
    zero_atom_prob: float = 0.2
    seed: int = 0
    equal_probs: bool = False

    def __post_init__(self):
        if not (isinstance(self.trials, int) and self.trials >= 1):
            raise InvalidConfig(f"trials must be an integer >= 1, got {self.trials!r}")
        if not (isinstance(self.max_atoms, int) and self.max_atoms >= 1):
            raise InvalidConfig(f"max_atoms must be an integer >= 1, got {self.max_atoms!r}")
        if not (self.value_cap > 0 and math.isfinite(self.value_cap)):
            raise InvalidConfig(f"value_cap must be finite and > 0, got {self.value_cap!r}")
        if not 0.0 <= self.zero_atom_prob <= 1.0:
            raise InvalidConfig(f"zero_atom_prob must be in [0, 1], got {self.zero_atom_prob!r}")
        if not (isinstance(self.seed, int) and 0 <= self.seed < 2**64):
            raise InvalidConfig(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")


@dataclass
class VerificationReport:
    suite: str
    trials: int
    failures: int
    worst_violation: float
    witness: Optional[DiscreteDistribution] = None
    elapsed: float = 0.0
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def to_dict(self, elapsed: bool = True) -> dict:
        out = {
            "suite": self.suite,
            "trials": self.trials,
            "failures": self.failures,
            "worst_violation": self.worst_violation,
            "witness": self.witness.to_dict() if self.witness is not None else None,
        }
        if elapsed:
            out["elapsed_ms"] = 1000.0 * self.elapsed
        out["details"] = self.details
        return out


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed + (trial << 64)))


def _draw_atoms(cfg: CampaignConfig, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    k = int(rng.integers(1, cfg.max_atoms + 1))
    values = rng.uniform(0.0, cfg.value_cap, k)
    if rng.random() < cfg.zero_atom_prob:
        values[rng.integers(k)] = 0.0
    probs = np.full(k, 1.0 / k) if cfg.equal_probs else rng.dirichlet(np.ones(k))
    return values, probs


def random_distribution(cfg: CampaignConfig, rng: np.random.Generator) -> DiscreteDistribution:
    """1..max_atoms atoms, values uniform on [0, value_cap], flat-simplex weights."""
    values, probs = _draw_atoms(cfg, rng)
    return make_distribution(zip(values, probs))


def trial_distribution(cfg: CampaignConfig, trial: int) -> DiscreteDistribution:
    return random_distribution(cfg, trial_rng(cfg.seed, trial))


def _pack(draws: list[tuple[np.ndarray, np.ndarray]], width: int) -> tuple[np.ndarray, np.ndarray]:
    x = np.zeros((len(draws), width))
    w = np.zeros((len(draws), width))
    for i, (vals, probs) in enumerate(draws):
        x[i, : len(vals)] = vals
        w[i, : len(probs)] = probs
    return x, w


def _batch(cfg: CampaignConfig, start: int, stop: int):
    draws = [_draw_atoms(cfg, trial_rng(cfg.seed, i)) for i in range(start, stop)]
    x, w = _pack(draws, cfg.max_atoms)
    return x, w, kernels.batch_summaries(x, w)


def _bounds(S: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    V, E, F = S[:, kernels.V], S[:, kernels.E], S[:, kernels.F]
    with np.errstate(divide="ignore", invalid="ignore"):
        evf = np.where(F == V, 0.0, F / (F - V) * V)
    return np.maximum(2.0 * V, E), np.minimum(2.0 * V, evf)


def _equality_mask(w: np.ndarray) -> np.ndarray:
    live = w > 0
    n = live.sum(axis=1)
    halves = np.all(~live | (np.abs(w - 0.5) <= 1e-12), axis=1)
    return (n == 1) | ((n == 2) & halves)


def _sandwich_chunk(cfg: CampaignConfig, start: int, stop: int) -> np.ndarray:
    _, w, S = _batch(cfg, start, stop)
    upper, lower = _bounds(S)
    gap = S[:, kernels.GAP]
    scale = np.maximum(1.0, S[:, kernels.MEAN])
    margin = np.maximum(lower - gap, gap - upper) / scale - SANDWICH_TOL
    eq = _equality_mask(w)
    eq_margin = np.maximum(np.abs(gap - upper), np.abs(gap - lower)) / scale - EQUALITY_TOL
    return np.where(eq, np.maximum(margin, eq_margin), margin)


def _lemma_var_chunk(cfg: CampaignConfig, start: int, stop: int) -> np.ndarray:
    _, w, S = _batch(cfg, start, stop)
    M = S[:, kernels.M_MAX]
    ms = S[:, kernels.MEAN_SQRT]
    var = S[:, kernels.V]
    bound = (ms - np.sqrt(S[:, kernels.M_MIN])) * (np.sqrt(M) - ms)
    slack = bound - var
    ineq = -slack - LEMMA_VAR_TOL * M
    n = (w > 0).sum(axis=1)
    # equality iff at most two support points
    eq = np.where(n <= 2, slack - LEMMA_VAR_EQ_TOL * M, LEMMA_VAR_EQ_TOL * M - slack)
    return np.maximum(ineq, eq) / np.maximum(1.0, M)


def _run(
    suite: str,
    cfg: CampaignConfig,
    chunk_fn: Callable[[CampaignConfig, int, int], np.ndarray],
    witness_fn: Callable[[CampaignConfig, int], DiscreteDistribution],
    workers: int = 1,
) -> VerificationReport:
    t0 = time.perf_counter()
    spans = [(s, min(s + CHUNK, cfg.trials)) for s in range(0, cfg.trials, CHUNK)]
    if workers > 1 and len(spans) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(chunk_fn, [cfg] * len(spans), *zip(*spans)))
    else:
        parts = [chunk_fn(cfg, s, e) for s, e in spans]
    margins = np.concatenate(parts)
    worst_i = int(np.argmax(margins))
    failures = int(np.count_nonzero(margins > 0))
    return VerificationReport(
        suite=suite,
        trials=cfg.trials,
        failures=failures,
        worst_violation=float(margins[worst_i]),
        witness=witness_fn(cfg, worst_i),
        elapsed=time.perf_counter() - t0,
        details={"seed": cfg.seed, "generator": GENERATOR, "backend": kernels.BACKEND, "worst_trial": worst_i},
    )


def falsify_sandwich(cfg: CampaignConfig, workers: int = 1) -> VerificationReport:
    """lower <= gap <= upper on random laws, scaled by max(1, mean).

    Laws flagged as equality cases must also meet both bounds within 1e-10.
    """
    return _run("sandwich", cfg, _sandwich_chunk, trial_distribution, workers)


def verify_lemma_var(cfg: CampaignConfig, workers: int = 1) -> VerificationReport:
    """Var sqrt(X) <= (E sqrt(X) - sqrt(m)) (sqrt(M) - E sqrt(X)), tight iff <= 2 points."""
    return _run("lemvar", cfg, _lemma_var_chunk, trial_distribution, workers)


# --- equality cases, minimality of E_VF, attainment ----------------------------


def _symmetric_law(cfg: CampaignConfig, rng: np.random.Generator) -> DiscreteDistribution:
    b = math.sqrt(cfg.value_cap)
    a, c = sorted(rng.uniform(0.0, b, 2))
    if rng.random() < 0.1:
        c = a
    elif rng.random() < cfg.zero_atom_prob:
        a = 0.0
    return make_distribution([(a * a, 0.5), (c * c, 0.5)])


def _asymmetric_law(cfg: CampaignConfig, rng: np.random.Generator) -> DiscreteDistribution:
    k = int(rng.integers(2, max(3, cfg.max_atoms) + 1))
    values = rng.uniform(0.0, cfg.value_cap, k)
    if rng.random() < cfg.zero_atom_prob:
        values[rng.integers(k)] = 0.0
    if k == 2:
        p = rng.uniform(0.0, 1.0)
        while abs(p - 0.5) <= 1e-9:
            p = rng.uniform(0.0, 1.0)
        probs = np.array([p, 1.0 - p])
    else:
        probs = rng.dirichlet(np.ones(k))
    return make_distribution(zip(values, probs))


def _symmetric_witness(cfg, i):
    return _symmetric_law(cfg, trial_rng(cfg.seed, i))


def _asymmetric_witness(cfg, i):
    return _asymmetric_law(cfg, trial_rng(cfg.seed, cfg.trials + i))


def _prop3_sym_chunk(cfg: CampaignConfig, start: int, stop: int) -> np.ndarray:
    out = np.empty(stop - start)
    for j, i in enumerate(range(start, stop)):
        s = sqrt_moments(_symmetric_witness(cfg, i))
        upper, lower = upper_bound(s.V, s.E), lower_bound(s.V, s.F)
        out[j] = max(abs(s.gap - upper), abs(s.gap - lower)) / max(1.0, s.mean) - EQUALITY_TOL
    return out


def _prop3_asym_chunk(cfg: CampaignConfig, start: int, stop: int) -> np.ndarray:
    out = np.empty(stop - start)
    for j, i in enumerate(range(start, stop)):
        d = _asymmetric_witness(cfg, i)
        s = sqrt_moments(d)
        scale = max(1.0, s.mean)
        upper, lower = upper_bound(s.V, s.E), lower_bound(s.V, s.F)
        sandwich = max(lower - s.gap, s.gap - upper) / scale - SANDWICH_TOL
        if is_equality_case(d):
            out[j] = sandwich
            continue
        slack = max(upper - s.gap, s.gap - lower) / scale
        out[j] = max(sandwich, SLACK_FLOOR - slack)
    return out


def verify_prop3(cfg: CampaignConfig, workers: int = 1) -> VerificationReport:
    """Both bounds are tight together exactly for sqrt-symmetric <=2-point laws.

    Runs ``cfg.trials`` symmetric two-point laws (both bounds must equal the
    gap) and ``cfg.trials`` non-symmetric laws (some bound must stay slack).
    """
    t0 = time.perf_counter()
    sym = _run("prop3", cfg, _prop3_sym_chunk, _symmetric_witness, workers)
    asym = _run("prop3", cfg, _prop3_asym_chunk, _asymmetric_witness, workers)
    worst = sym if sym.worst_violation >= asym.worst_violation else asym
    return VerificationReport(
        suite="prop3",
        trials=sym.trials + asym.trials,
        failures=sym.failures + asym.failures,
        worst_violation=worst.worst_violation,
        witness=worst.witness,
        elapsed=time.perf_counter() - t0,
        details={
            "seed": cfg.seed,
            "generator": GENERATOR,
            "symmetric": {"trials": sym.trials, "failures": sym.failures, "worst_violation": sym.worst_violation},
            "asymmetric": {"trials": asym.trials, "failures": asym.failures, "worst_violation": asym.worst_violation},
        },
    )


def lo_member(V: float, F: float, rng: np.random.Generator, max_tries: int = 10_000):
    """A random 3-to-5 point law with the given V and F.

    The top sqrt-atom ``b`` and ``E sqrt(X)`` come from a shifted two-point
    lo law with lower point ``u > 0``. A new bottom ``a < u`` and 1..3
    interior atoms are drawn; the bottom, top and total interior mass are
    then solved for so that the first two moments of sqrt(X) are restored.
    Draws with a nonpositive solved mass are rejected.

    Returns ``(distribution, interior_mass, tries)``.
    """
    width = two_point_lo(V, F).width
    u = width * rng.uniform(0.25, 2.0)
    spec = two_point_lo(V, F, u)
    b = spec.v
    mu = spec.p * spec.u + spec.q * b
    for tries in range(1, max_tries + 1):
        a = rng.uniform(0.0, u)
        k = int(rng.integers(1, 4))
        ys = rng.uniform(a, b, k)
        ws = rng.dirichlet(np.ones(k))
        # centred on mu with pb = 1 - pa - t eliminated; the raw 3x3 system
        # loses digits to the m2 - mu**2 cancellation when F is near V
        al, be = a - mu, b - mu
        ga = float(ws @ (ys - mu))
        de = float(ws @ (ys - mu) ** 2)
        a11, a12, r1 = al - be, ga - be, -be
        a21, a22, r2 = al * al - be * be, de - be * be, V - be * be
        det = a11 * a22 - a12 * a21
        if det == 0.0:
            continue
        pa = (r1 * a22 - a12 * r2) / det
        t = (a11 * r2 - a21 * r1) / det
        pb = 1.0 - pa - t
        if pa > 0 and pb > 0 and t > 0 and np.all((ys > a) & (ys < b)):
            pairs = [(a * a, pa), (b * b, pb)] + [(y * y, t * wi) for y, wi in zip(ys, ws)]
            return make_distribution(pairs), float(t), tries
    raise RuntimeError(f"no feasible member of X_lo for (V, F) = ({V}, {F}) in {max_tries} draws")


def verify_mixture(V: float, eps_values=MIXTURE_EPS, n_quad: int = 64) -> VerificationReport:
    """F = inf: E of X_eps must be (1 + eps) V, decreasing to V, never reaching it."""
    if not V > 0:
        raise InadmissiblePair(f"(V, F) = ({V!r}, inf) needs V > 0")
    t0 = time.perf_counter()
    rows, margins = [], []
    for eps in eps_values:
        s = sqrt_moments(mixture_members(V, eps, n_quad))
        target = (1.0 + eps) * V
        rows.append({"eps": eps, "E_X": s.E, "target": target, "V_X": s.V})
        margins.append(max(abs(s.E - target) / target, abs(s.V - V) / V) - MIXTURE_TOL)
        # the infimum V is never reached
        margins.append(SLACK_FLOOR - (s.E - V) / V)
    for prev, nxt in zip(rows, rows[1:]):
        margins.append(SLACK_FLOOR - (prev["E_X"] - nxt["E_X"]) / V)
    margins = np.array(margins)
    return VerificationReport(
        suite="prop2",
        trials=len(rows),
        failures=int(np.count_nonzero(margins > 0)),
        worst_violation=float(margins.max()),
        elapsed=time.perf_counter() - t0,
        details={"F": "INF", "E_VF": V, "n_quad": n_quad, "mixture": rows},
    )


def verify_prop2(V: float, F: float, cfg: CampaignConfig) -> VerificationReport:
    """E_VF is the least E over laws with the given (V, F), attained only on two points."""
    if F == math.inf:
        return verify_mixture(V)
    if not F > V > 0:
        raise InadmissiblePair(f"(V, F) = ({V!r}, {F!r}) needs F > V > 0")
    t0 = time.perf_counter()
    target = e_vf(V, F)
    two = sqrt_moments(spec_to_distribution(two_point_lo(V, F), 0.0))
    two_point_err = abs(two.E - target) / target
    margins = np.empty(cfg.trials)
    min_excess = math.inf
    min_excess_heavy = math.inf
    tries = 0
    for i in range(cfg.trials):
        d, interior, n = lo_member(V, F, trial_rng(cfg.seed, i))
        tries += n
        s = sqrt_moments(d)
        excess = s.E - target
        member = max(abs(s.V - V) / V, abs(s.F - F) / F) - PROP2_TOL
        margin = max(member, -excess - PROP2_TOL)
        if interior > PROP2_STRICT:
            margin = max(margin, PROP2_STRICT - excess)
        if interior >= 0.1:
            margin = max(margin, 1e-6 - excess / V)
        margins[i] = margin
        min_excess = min(min_excess, excess)
        if interior >= 0.1:
            min_excess_heavy = min(min_excess_heavy, excess / V)
    worst_i = int(np.argmax(margins))
    worst_d = lo_member(V, F, trial_rng(cfg.seed, worst_i))[0]
    two_margin = two_point_err - 1e-10
    return VerificationReport(
        suite="prop2",
        trials=cfg.trials,
        failures=int(np.count_nonzero(margins > 0)) + (two_margin > 0),
        worst_violation=float(max(margins.max(), two_margin)),
        witness=worst_d,
        elapsed=time.perf_counter() - t0,
        details={
            "seed": cfg.seed,
            "generator": GENERATOR,
            "E_VF": target,
            "two_point_E": two.E,
            "two_point_rel_err": two_point_err,
            "min_excess": min_excess,
            "min_excess_over_V_interior_ge_0.1": min_excess_heavy,
            "acceptance_rate": cfg.trials / tries,
        },
    )


def attainment_grid(u: float, width: float, size: int) -> np.ndarray:
    """Shifts from -u to u + 1e9 * width: the endpoint, then log-spaced offsets."""
    top = 2.0 * u + 1e9 * width
    offsets = np.concatenate([[0.0], np.geomspace(1e-6 * width, top, size - 1)])
    return -u + offsets


def verify_attainment(V: float, param: float, side: str, grid_size: int = 1000, u: float = 0.0) -> VerificationReport:
    """psi over the extremal family stays within the bounds and reaches the exact one."""
    if side not in ("hi", "lo"):
        raise ValueError(f"side must be 'hi' or 'lo', got {side!r}")
    if grid_size < 100:
        raise ValueError(f"grid_size must be >= 100, got {grid_size}")
    t0 = time.perf_counter()
    if side == "hi":
        if not admissible_hi(V, param):
            raise InadmissiblePair(f"(V, E) = ({V!r}, {param!r}) needs E = V = 0 or E > V > 0")
        spec = two_point_hi(V, param, u)
        target = upper_bound(V, param)
    else:
        if not admissible_lo(V, param):
            raise InadmissiblePair(f"(V, F) = ({V!r}, {param!r}) needs F = V = 0 or F > V > 0")
        spec = two_point_lo(V, param, u)
        target = lower_bound(V, param)
    cs = attainment_grid(spec.u, spec.width, grid_size)
    vals = kernels.psi_grid(spec.u, spec.v, spec.p, cs)

    # Shifting leaves V, E, F unchanged; recompute them from the actual law
    # while squaring is still exact enough, then fall back to the closed forms.
    safe = cs <= 1e3 * spec.width
    stats = [sqrt_moments(spec_to_distribution(spec, c)) for c in cs[safe]]
    Vs = np.full(cs.shape, spec.V)
    Es = np.full(cs.shape, spec.E)
    Fs = np.full(cs.shape, spec.F)
    Vs[safe] = [s.V for s in stats]
    Es[safe] = [s.E for s in stats]
    Fs[safe] = [s.F for s in stats]
    uppers = np.maximum(2.0 * Vs, Es)
    lowers = np.minimum(2.0 * Vs, Fs / (Fs - Vs) * Vs)
    margins = np.maximum(lowers - vals, vals - uppers) / np.maximum(1.0, uppers) - 1e-9

    idx = int(np.argmax(vals)) if side == "hi" else int(np.argmin(vals))
    extremum = float(vals[idx])
    ext_margin = abs(extremum - target) / target - ATTAIN_TOL
    if spec.p == spec.q:
        regime = "constant"
    elif (side == "hi") == (spec.p < spec.q):
        regime = "endpoint"
    else:
        regime = "limit"
    return VerificationReport(
        suite="attain",
        trials=grid_size,
        failures=int(np.count_nonzero(margins > 0)) + int(ext_margin > 0),
        worst_violation=float(max(margins.max(), ext_margin)),
        witness=spec_to_distribution(spec, float(cs[idx])) if cs[idx] <= 1e3 * spec.width else None,
        elapsed=time.perf_counter() - t0,
        details={
            "side": side,
            "spec": spec.to_dict(),
            "target": target,
            "extremum": extremum,
            "extremum_c": float(cs[idx]),
            "extremum_index": idx,
            "regime": regime,
        },
    )
