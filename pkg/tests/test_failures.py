"""Failure-count distribution: exact oracles and sampling checks."""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
import scipy.stats

from sdpbounds.failures import (
    FailurePopulation,
    binomial_cdf_below,
    binomial_log_pmf,
    binomial_pmf,
    expected_failures,
    sample_failures,
)


def pmf_fraction(l: int, p: Fraction, k: int) -> Fraction:
    """Independent exact-rational PMF oracle."""
    return Fraction(math.comb(l, k)) * p**k * (1 - p) ** (l - k)


def test_population_validation() -> None:
    with pytest.raises(ValueError):
        FailurePopulation(l=0, p=0.5)
    with pytest.raises(ValueError):
        FailurePopulation(l=10, p=0.0)
    with pytest.raises(ValueError):
        FailurePopulation(l=10, p=1.0)
    with pytest.raises(ValueError):
        FailurePopulation(l=2.5, p=0.5)  # type: ignore[arg-type]


def test_expected_failures() -> None:
    assert expected_failures(FailurePopulation(10, 0.3)) == pytest.approx(3.0, abs=0)
    assert expected_failures(FailurePopulation(1, 0.5)) == 0.5
    assert expected_failures(FailurePopulation(100, 0.1)) == pytest.approx(10.0, rel=1e-15)


def test_pmf_trivial_points() -> None:
    assert binomial_pmf(FailurePopulation(2, 0.5), 1) == pytest.approx(0.5, rel=1e-14)
    # Exact rational oracle: C(10,2)/2^10 = 45/1024.
    assert binomial_pmf(FailurePopulation(10, 0.5), 2) == pytest.approx(45 / 1024, rel=1e-13)
    assert binomial_pmf(FailurePopulation(1, 0.3), 1) == pytest.approx(0.3, rel=1e-14)


def test_pmf_out_of_range_k() -> None:
    pop = FailurePopulation(5, 0.4)
    with pytest.raises(ValueError):
        binomial_pmf(pop, -1)
    with pytest.raises(ValueError):
        binomial_pmf(pop, 6)


def test_pmf_against_exact_rationals() -> None:
    # Rational p values make the exact PMF a computable Fraction.
    for l, p_frac in [(10, Fraction(1, 2)), (100, Fraction(1, 10)), (537, Fraction(3, 10)), (1000, Fraction(99, 100))]:
        pop = FailurePopulation(l, float(p_frac))
        ks = sorted({0, 1, l // 3, l // 2, l - 1, l})
        for k in ks:
            exact = pmf_fraction(l, p_frac, k)
            got = binomial_pmf(pop, k)
            if exact == 0:
                assert got == 0.0
            else:
                assert got == pytest.approx(float(exact), rel=5e-13)


def test_pmf_accuracy_large_l() -> None:
    # 1e-12 relative contract at l = 1e6, checked against mpmath.
    mpmath = pytest.importorskip("mpmath")
    mpmath.mp.dps = 40
    l = 10**6
    for p, k in [(0.5, 500_000), (0.5, 499_000), (0.1, 100_000), (0.25, 250_500), (0.001, 1_000)]:
        pop = FailurePopulation(l, p)
        exact = mpmath.binomial(l, k) * mpmath.mpf(p) ** k * (1 - mpmath.mpf(p)) ** (l - k)
        got = binomial_pmf(pop, k)
        assert abs(got - float(exact)) / float(exact) <= 1e-12


def test_pmf_sums_to_one_across_l_and_p() -> None:
    for l in (1, 2, 10, 100, 1000, 10_000):
        for p in (0.01, 0.1, 0.5, 0.9, 0.99):
            pop = FailurePopulation(l, p)
            total = math.fsum(np.exp(binomial_log_pmf(pop, np.arange(l + 1))))
            assert abs(total - 1.0) <= 1e-10, (l, p, total)


def test_pmf_mean_matches_expectation() -> None:
    for l in (10, 100, 10_000):
        for p in (0.1, 0.5, 0.9):
            pop = FailurePopulation(l, p)
            ks = np.arange(l + 1)
            mean = float(np.sum(ks * np.exp(binomial_log_pmf(pop, ks))))
            assert mean == pytest.approx(expected_failures(pop), rel=1e-9)


def test_cdf_spec_examples() -> None:
    # (1 + 10 + 45)/1024 exactly.
    assert binomial_cdf_below(FailurePopulation(10, 0.5), 3.0) == pytest.approx(56 / 1024, rel=1e-13)
    assert binomial_cdf_below(FailurePopulation(10, 0.5), 0.0) == 0.0
    assert binomial_cdf_below(FailurePopulation(7, 0.3), -2.0) == 0.0
    # Exact rational: Pr[X < 2] at l=100, p=1/10.
    exact = pmf_fraction(100, Fraction(1, 10), 0) + pmf_fraction(100, Fraction(1, 10), 1)
    assert float(exact) == pytest.approx(3.21688053194115e-4, rel=1e-11)
    assert binomial_cdf_below(FailurePopulation(100, 0.1), 2.0) == pytest.approx(float(exact), rel=1e-12)


def test_cdf_strict_inequality_semantics() -> None:
    pop = FailurePopulation(10, 0.5)
    # Integer threshold excludes the threshold value itself.
    assert binomial_cdf_below(pop, 3.0) == pytest.approx(56 / 1024, rel=1e-13)
    assert binomial_cdf_below(pop, 3.0000001) == pytest.approx((56 + 120) / 1024, rel=1e-13)
    assert binomial_cdf_below(pop, 2.5) == binomial_cdf_below(pop, 3.0)


def test_cdf_monotone_and_saturates() -> None:
    pop = FailurePopulation(25, 0.37)
    thresholds = [-1.0, 0.0, 0.5, 1.0, 3.7, 9.0, 24.0, 25.0, 25.5, 30.0]
    values = [binomial_cdf_below(pop, t) for t in thresholds]
    for lo, hi in zip(values, values[1:]):
        assert lo <= hi
    assert values[0] == 0.0 and values[1] == 0.0
    assert binomial_cdf_below(pop, 26.0) == 1.0
    # threshold just above l saturates at exactly 1.
    assert binomial_cdf_below(pop, 25.0) < 1.0


def test_cdf_cross_check_scipy() -> None:
    # scipy's incomplete-beta CDF is an algorithmically independent route.
    for l, p in [(10, 0.5), (100, 0.1), (1000, 0.73)]:
        pop = FailurePopulation(l, p)
        for thr in (1.0, 2.0, l * p, l * p + 3.5):
            k_below = math.ceil(thr) - 1
            want = scipy.stats.binom.cdf(k_below, l, p)
            assert binomial_cdf_below(pop, thr) == pytest.approx(want, rel=1e-10)


class _ForcedRng:
    """Degenerate uniform source driving every Bernoulli indicator one way."""

    def __init__(self, value: float) -> None:
        self._value = value

    def random(self, n: int) -> np.ndarray:
        return np.full(n, self._value)


def test_sampling_forced_extremes() -> None:
    pop = FailurePopulation(5, 0.5)
    assert sample_failures(pop, _ForcedRng(0.0), per_indicator=True) == 5
    assert sample_failures(pop, _ForcedRng(0.99999), per_indicator=True) == 0


def test_sampling_mean_clt() -> None:
    pop = FailurePopulation(10, 0.5)
    rng = np.random.default_rng(20240817)
    n = 10**6
    draws = rng.binomial(pop.l, pop.p, size=n)
    # Same generator contract as sample_failures' exact path.
    sd = math.sqrt(pop.l * pop.p * (1 - pop.p))
    assert abs(draws.mean() - 5.0) <= 3.0 * sd / math.sqrt(n)


def test_sampling_matches_cdf_ks() -> None:
    n = 10**6
    for l, p, seed in [(10, 0.5, 11), (100, 0.1, 12)]:
        pop = FailurePopulation(l, p)
        rng = np.random.default_rng(seed)
        draws = np.array([sample_failures(pop, rng) for _ in range(1000)])
        # Exact sampler bulk draw for the large-n KS check.
        draws = np.concatenate([draws, rng.binomial(l, p, size=n - 1000)])
        ks = 0.0
        for k in range(l + 1):
            empirical = np.count_nonzero(draws <= k) / n
            exact = binomial_cdf_below(pop, k + 1.0)
            ks = max(ks, abs(empirical - exact))
        assert ks <= 0.002, (l, p, ks)


def test_per_indicator_mode_distribution() -> None:
    pop = FailurePopulation(10, 0.5)
    rng = np.random.default_rng(99)
    draws = np.array([sample_failures(pop, rng, per_indicator=True) for _ in range(20_000)])
    assert abs(draws.mean() - 5.0) <= 3.0 * math.sqrt(2.5) / math.sqrt(20_000)
