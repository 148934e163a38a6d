import math
import statistics

import mpmath
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from amgm_gap.core import (
    DiscreteDistribution,
    DistributionError,
    EmptySupport,
    NegativeValue,
    ProbSumOutOfTolerance,
    amgm_gap,
    from_dict,
    log_mean,
    make_distribution,
    mean,
    sqrt_moments,
    uniform_from_values,
)


def atoms_strategy(max_atoms=8, cap=100.0):
    """Random finite laws: values in [0, cap], positive weights normalized."""
    return st.lists(
        st.tuples(
            st.floats(0.0, cap, allow_nan=False, allow_infinity=False),
            st.floats(1e-3, 1.0),
        ),
        min_size=1,
        max_size=max_atoms,
    ).map(lambda pairs: make_distribution([(x, w / math.fsum(w for _, w in pairs)) for x, w in pairs]))


def atomwise(d: DiscreteDistribution):
    """Direct sums of the defining expectations, no algebraic shortcuts."""
    ys = [(math.sqrt(x), p) for x, p in d.atoms]
    a, b = ys[0][0], ys[-1][0]
    ey = math.fsum(p * y for y, p in ys)
    V = math.fsum(p * y * y for y, p in ys) - ey**2
    E = math.fsum(p * (y - a) ** 2 for y, p in ys)
    F = math.fsum(p * (b - y) ** 2 for y, p in ys)
    return V, E, F


class TestMakeDistribution:
    def test_merge_and_sort(self):
        d = make_distribution([(4, 0.5), (4, 0.25), (1, 0.25)])
        assert d.atoms == ((1.0, 0.25), (4.0, 0.75))

    def test_identity(self):
        assert make_distribution([(2, 1.0)]).atoms == ((2.0, 1.0),)

    def test_prob_sum_out_of_tolerance(self):
        with pytest.raises(ProbSumOutOfTolerance):
            make_distribution([(1, 0.3), (9, 0.8)])

    def test_zero_probs_dropped(self):
        d = make_distribution([(3, 0.0), (5, 1.0)])
        assert d.atoms == ((5.0, 1.0),)

    def test_all_zero_probs(self):
        with pytest.raises(EmptySupport):
            make_distribution([(3, 0.0)])

    def test_empty(self):
        with pytest.raises(EmptySupport):
            make_distribution([])

    def test_negative_value_names_atom(self):
        with pytest.raises(NegativeValue, match="atom 1"):
            make_distribution([(1, 0.5), (-2, 0.5)])

    def test_negative_prob(self):
        with pytest.raises(DistributionError):
            make_distribution([(1, 1.5), (2, -0.5)])

    def test_renormalized_within_tolerance(self):
        d = make_distribution([(1, 0.5 + 4e-13), (2, 0.5)])
        assert math.fsum(d.probs) == pytest.approx(1.0, abs=1e-15)

    def test_near_equal_values_not_merged(self):
        d = make_distribution([(1.0, 0.5), (1.0 + 1e-15, 0.5)])
        assert len(d) == 2


class TestUniform:
    def test_two_values(self):
        assert uniform_from_values([1, 9]).atoms == ((1.0, 0.5), (9.0, 0.5))

    def test_repeats_merge(self):
        assert uniform_from_values([3, 3, 3]).atoms == ((3.0, 1.0),)

    def test_four_values(self):
        d = uniform_from_values([0, 1, 2, 3])
        assert d.values == (0.0, 1.0, 2.0, 3.0)
        assert all(p == 0.25 for p in d.probs)

    def test_empty(self):
        with pytest.raises(EmptySupport):
            uniform_from_values([])

    def test_negative(self):
        with pytest.raises(NegativeValue):
            uniform_from_values([1, -1])


class TestJson:
    def test_round_trip(self):
        d = make_distribution([(9, 0.75), (1, 0.25)])
        assert from_dict(d.to_dict()) == d

    def test_bare_array(self):
        assert from_dict([1, 9]) == uniform_from_values([1, 9])

    def test_bad_atom_named(self):
        with pytest.raises(DistributionError, match="atom 0"):
            from_dict({"atoms": [{"x": 1}]})


class TestLogMeanAndGap:
    def test_log_mean_uniform_1_9(self):
        assert log_mean(uniform_from_values([1, 9])) == pytest.approx(math.log(3), rel=1e-15)

    def test_log_mean_zero_atom(self):
        assert log_mean(make_distribution([(0, 0.5), (4, 0.5)])) == -math.inf

    def test_log_mean_e(self):
        assert log_mean(make_distribution([(math.e, 1.0)])) == pytest.approx(1.0, rel=1e-15)

    def test_gap_uniform_1_9(self):
        assert amgm_gap(uniform_from_values([1, 9])) == pytest.approx(2.0, rel=1e-14)

    @pytest.mark.parametrize("c", [0.0, 1e-300, 0.7, 3.0, 1e6, 1e300])
    def test_gap_degenerate(self, c):
        assert amgm_gap(make_distribution([(c, 1.0)])) == 0.0

    def test_gap_zero_atom(self):
        assert amgm_gap(make_distribution([(0, 0.5), (4, 0.5)])) == 2.0

    def test_gap_near_equal_pair(self):
        # AM - GM of {a, b} is (sqrt b - sqrt a)**2 / 2; plain mean - exp(log_mean) is off by 4e-12 here
        a, b = 92.80154618197076, 93.95319047889082
        want = (math.sqrt(b) - math.sqrt(a)) ** 2 / 2
        assert amgm_gap(uniform_from_values([a, b])) == pytest.approx(want, rel=1e-12)

    @settings(max_examples=150, deadline=None)
    @given(st.lists(st.floats(1e-3, 1e3), min_size=2, max_size=10))
    def test_gap_matches_mp_oracle(self, xs):
        with mpmath.workdps(50):
            n = len(xs)
            am = mpmath.fsum(map(mpmath.mpf, xs)) / n
            gm = mpmath.exp(mpmath.fsum(mpmath.log(mpmath.mpf(x)) for x in xs) / n)
            want = float(am - gm)
        got = amgm_gap(uniform_from_values(xs))
        # relative where the values spread, absolute (scale of the mean) where they nearly coincide
        assert abs(got - want) <= 1e-12 * want + 1e-15 * float(am)


class TestSqrtMoments:
    def test_uniform_1_9(self):
        s = sqrt_moments(uniform_from_values([1, 9]))
        assert (s.V, s.m, s.M, s.E, s.F) == pytest.approx((1, 1, 9, 2, 2), rel=1e-14)

    def test_degenerate(self):
        s = sqrt_moments(make_distribution([(7.5, 1.0)]))
        assert (s.V, s.E, s.F, s.m, s.M) == (0.0, 0.0, 0.0, 7.5, 7.5)

    def test_zero_atom_two_point(self):
        s = sqrt_moments(make_distribution([(0, 0.25), (16 / 3, 0.75)]))
        assert s.V == pytest.approx(1.0, rel=1e-14)
        assert s.E == pytest.approx(4.0, rel=1e-14)
        assert s.F == pytest.approx(4 / 3, rel=1e-14)
        assert s.gap == pytest.approx(4.0, rel=1e-14)

    @given(atoms_strategy())
    def test_matches_atomwise_oracle(self, d):
        s = sqrt_moments(d)
        V, E, F = atomwise(d)
        scale = max(1.0, s.M)
        assert s.V == pytest.approx(V, abs=1e-12 * scale)
        assert s.E == pytest.approx(E, abs=1e-12 * scale)
        assert s.F == pytest.approx(F, abs=1e-12 * scale)

    @given(atoms_strategy())
    def test_invariants(self, d):
        s = sqrt_moments(d)
        assert s.V >= 0
        assert s.E >= s.V and s.F >= s.V
        assert s.m <= s.M
        assert s.gap >= 0
        assert s.E == pytest.approx(s.V + (s.mean_sqrt - math.sqrt(s.m)) ** 2, rel=1e-10, abs=1e-300)
        if s.log_mean == -math.inf:
            assert s.gap == s.mean

    @given(atoms_strategy())
    def test_single_atom_iff_e_equals_v(self, d):
        s = sqrt_moments(d)
        assert (s.E == s.V) == (len(d) == 1)

    @given(atoms_strategy(), st.floats(1e-3, 1e3))
    def test_scale_covariance(self, d, k):
        # subnormal atoms do not scale exactly, so d.scaled(k) would be a different law
        assume(all(x == 0.0 or x >= 1e-300 for x in d.values))
        a, b = sqrt_moments(d), sqrt_moments(d.scaled(k))
        for name in ("mean", "gap", "V", "E", "F", "m", "M"):
            x, y = getattr(a, name), getattr(b, name)
            assert y == pytest.approx(k * x, rel=1e-10, abs=1e-12 * k * max(1.0, a.mean)), name

    @given(atoms_strategy())
    def test_lemma_var(self, d):
        s = sqrt_moments(d)
        a, b = math.sqrt(s.m), math.sqrt(s.M)
        bound = (s.mean_sqrt - a) * (b - s.mean_sqrt)
        assert s.V <= bound + 1e-12 * s.M
        if len(d) <= 2:
            assert s.V == pytest.approx(bound, abs=1e-12 * max(1.0, s.M))

    @settings(max_examples=200)
    @given(st.lists(st.floats(1e-3, 1e3), min_size=1, max_size=10))
    def test_classical_am_gm(self, xs):
        d = uniform_from_values(xs)
        am = statistics.fmean(xs)
        gm = statistics.geometric_mean(xs)
        assert mean(d) == pytest.approx(am, rel=1e-12)
        assert math.exp(log_mean(d)) == pytest.approx(gm, rel=1e-12)
