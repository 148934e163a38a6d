"""The eight acceptance criteria, each at its stated tolerance.

One PASS/FAIL line per criterion is printed in the terminal summary.
"""
import io
import json
import math
import time

import mpmath
import numpy as np
import pytest

from amgm_gap.bounds import check_bounds, lower_bound, sandwich_tolerance, upper_bound
from amgm_gap.cli import main
from amgm_gap.core import amgm_gap, uniform_from_values
from amgm_gap.extremal import TwoPointSpec, psi, psi_asymptotic, psi_direct, psi_limit
from amgm_gap.verify import (
    CampaignConfig,
    attainment_grid,
    falsify_sandwich,
    trial_rng,
    verify_attainment,
    verify_lemma_var,
    verify_mixture,
    verify_prop2,
    verify_prop3,
)
from amgm_gap.kernels import C_SWITCH

SEED = 20240601


@pytest.mark.criterion(1, "sandwich holds on 100,000 random laws at 1e-9, under 10 s")
def test_criterion_1_sandwich():
    cfg = CampaignConfig(trials=100_000, max_atoms=8, value_cap=100.0, zero_atom_prob=0.2, seed=SEED)
    t0 = time.perf_counter()
    r = falsify_sandwich(cfg)
    elapsed = time.perf_counter() - t0
    assert r.trials == 100_000
    assert r.failures == 0, r.to_dict()
    assert elapsed < 10.0


@pytest.mark.criterion(2, "upper bound is the grid extremum of psi on two_point_hi, 1e-6 relative")
def test_criterion_2_upper_exact():
    for V in (0.5, 1.0, 2.0):
        for k in (1.1, 2.0, 5.0):
            E = k * V
            r = verify_attainment(V, E, "hi", 1000)
            assert r.failures == 0, r.to_dict()
            target = max(2 * V, E)
            assert abs(r.details["extremum"] - target) <= 1e-6 * target
            if E > 2 * V:
                assert r.details["regime"] == "endpoint" and r.details["extremum_index"] == 0
            elif E < 2 * V:
                assert r.details["regime"] == "limit"


@pytest.mark.criterion(3, "lower bound is the grid extremum of psi on two_point_lo, 1e-6 relative, in [V, 2V]")
def test_criterion_3_lower_exact():
    for V in (0.5, 1.0, 2.0):
        for k in (1.25, 2.0, 5.0):
            F = k * V
            r = verify_attainment(V, F, "lo", 1000)
            assert r.failures == 0, r.to_dict()
            target = lower_bound(V, F)
            assert target == min(2 * V, F * V / (F - V))
            assert abs(r.details["extremum"] - target) <= 1e-6 * target
            assert V <= target <= 2 * V
    rng = np.random.default_rng(SEED)
    for V, k in zip(rng.uniform(1e-3, 1e3, 2000), rng.uniform(1.0, 100.0, 2000)):
        lo = lower_bound(V, V * k) if k > 1 else lower_bound(V, math.inf)
        assert V <= lo <= 2 * V


@pytest.mark.criterion(4, "E_VF is attained on two points, strictly exceeded by 10,000 members, mixture at 1e-6")
def test_criterion_4_prop2():
    r = verify_prop2(1.0, 2.0, CampaignConfig(trials=10_000, seed=SEED))
    assert r.details["two_point_rel_err"] <= 1e-10
    assert r.trials == 10_000
    assert r.failures == 0, r.to_dict()
    assert r.details["min_excess"] > 0
    m = verify_mixture(1.0, (0.1, 0.01, 0.001), n_quad=64)
    assert m.failures == 0, m.to_dict()
    for row in m.details["mixture"]:
        assert abs(row["E_X"] - (1 + row["eps"])) <= 1e-6 * (1 + row["eps"])


@pytest.mark.criterion(5, "equal-weight two-point laws are tight both sides at 1e-10; others leave slack")
def test_criterion_5_prop3():
    r = verify_prop3(CampaignConfig(trials=10_000, seed=SEED))
    assert r.details["symmetric"]["trials"] == 10_000
    assert r.details["asymmetric"]["trials"] == 10_000
    assert r.failures == 0, r.to_dict()


@pytest.mark.criterion(6, "variance bound on 100,000 random laws, equality exactly on two-point supports")
def test_criterion_6_lemma_var():
    r = verify_lemma_var(CampaignConfig(trials=100_000, seed=SEED))
    assert r.trials == 100_000
    assert r.failures == 0, r.to_dict()


@pytest.mark.criterion(7, "psi branches agree at the switch to 1e-6; endpoint, far-field and p = q checks")
def test_criterion_7_psi_numerics():
    rng = trial_rng(SEED, 7)
    for _ in range(100):
        u = rng.uniform(0.0, 10.0)
        d = 10.0 ** rng.uniform(-3, 2)
        s = TwoPointSpec(u, u + d, rng.uniform(0.01, 0.99))
        c = C_SWITCH * d
        a, b = psi_direct(s, c), psi_asymptotic(s, c)
        assert abs(a - b) <= 1e-6 * abs(b)
        assert psi(s, -u) == pytest.approx(s.q * d * d, rel=1e-12)
        assert abs(psi(s, 1e9 * d) - psi_limit(s)) <= 1e-5 * psi_limit(s)
    for _ in range(20):
        u = rng.uniform(0.0, 10.0)
        d = 10.0 ** rng.uniform(-3, 2)
        s = TwoPointSpec(u, u + d, 0.5)
        vals = np.array([psi(s, c) for c in attainment_grid(u, d, 1000)])
        # constant at d**2 / 2, compared on the scale of that constant
        assert np.max(np.abs(vals - 0.5 * d * d)) <= 1e-9 * (0.5 * d * d)


def _mp_gap(xs):
    with mpmath.workdps(50):
        n = len(xs)
        am = mpmath.fsum(mpmath.mpf(x) for x in xs) / n
        gm = mpmath.exp(mpmath.fsum(mpmath.log(mpmath.mpf(x)) for x in xs) / n)
        return am - gm


@pytest.mark.criterion(8, "cmd_eval on 1,000 bare arrays gives AM - GM to 1e-12 relative, inside the bounds")
def test_criterion_8_uniform_vectors():
    rng = trial_rng(SEED, 8)
    for _ in range(1000):
        xs = [float(x) for x in rng.uniform(0.0, 100.0, int(rng.integers(1, 11))) if x > 0]
        out = io.StringIO()
        assert main(["eval", json.dumps(xs)], out=out) == 0
        doc = json.loads(out.getvalue())
        gap = doc["gap"]
        want = amgm_gap(uniform_from_values(xs))
        assert abs(gap - want) <= 1e-12 * abs(want)
        exact = float(_mp_gap(xs))
        assert abs(gap - exact) <= 1e-12 * max(abs(exact), 1e-300) or (len(set(xs)) == 1 and gap == 0.0)
        tol = sandwich_tolerance(doc["mean"])
        assert doc["lower"] - tol <= gap <= doc["upper"] + tol
        b = check_bounds(uniform_from_values(xs))
        assert (b.upper, b.lower) == (doc["upper"], doc["lower"])
