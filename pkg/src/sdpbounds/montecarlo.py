"""Seeded Monte Carlo estimation of tail events and expectations, plus the
auditor that compares bound reports against empirical or exact probabilities.

Determinism contract: the sample index space is split into fixed-size blocks;
block i draws from an independent substream derived from (seed, i), and block
statistics are merged in index order with compensated accumulation.  Results
are therefore bit-identical for any worker count and across runs.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .bounds import BoundReport, reliability_event_threshold
from .failures import FailurePopulation
from .hazards import CombinedHazardModel, WeibullParams, sdp_reliability

__all__ = [
    "BLOCK_SIZE",
    "MonteCarloEstimate",
    "AuditVerdict",
    "VERDICT_HOLDS",
    "VERDICT_VIOLATED",
    "VERDICT_INCONCLUSIVE",
    "VERDICT_EXACT_ZERO",
    "wilson_interval",
    "estimate_tail_probability",
    "estimate_expected_reliability",
    "estimate_reliability_exceedance",
    "tail_event_indicators",
    "audit_bound",
]

BLOCK_SIZE = 1 << 15

_Z95 = 1.959963984540054

VERDICT_HOLDS = "holds"
VERDICT_VIOLATED = "violated"
VERDICT_INCONCLUSIVE = "inconclusive"
VERDICT_EXACT_ZERO = "exact-zero-event"


@dataclass(frozen=True)
class MonteCarloEstimate:
    """Point estimate with a 95% interval and full reproducibility metadata.

    ``event_threshold`` is set by the tail estimators so the auditor can
    verify that a bound report and an estimate describe the same event.
    """

    estimate: float
    std_error: float
    ci_low: float
    ci_high: float
    n_samples: int
    seed: int
    event_threshold: Optional[float] = None

    def __post_init__(self) -> None:
        if not (self.ci_low <= self.estimate <= self.ci_high):
            raise ValueError(
                f"interval [{self.ci_low}, {self.ci_high}] does not contain estimate {self.estimate}"
            )
        if self.std_error < 0.0:
            raise ValueError(f"std_error must be >= 0, got {self.std_error}")


@dataclass(frozen=True)
class AuditVerdict:
    """Outcome of checking one bound value against the event probability."""

    verdict: str
    bound_value: float
    empirical_value: float
    margin: float
    empirical_is_exact: bool
    estimate: Optional[MonteCarloEstimate] = None


def wilson_interval(successes: int, n: int, z: float = _Z95) -> Tuple[float, float]:
    """Wilson score interval for a binomial proportion; robust near 0 and 1."""
    if n <= 0:
        raise ValueError("n must be positive")
    p_hat = successes / n
    denom = 1.0 + z * z / n
    center = (p_hat + z * z / (2.0 * n)) / denom
    half = (z / denom) * math.sqrt(p_hat * (1.0 - p_hat) / n + z * z / (4.0 * n * n))
    # At the boundary counts the analytic endpoint is exact; rounding in
    # center - half can otherwise push the interval off the observed rate.
    low = 0.0 if successes == 0 else max(0.0, center - half)
    high = 1.0 if successes == n else min(1.0, center + half)
    return low, high


def _validate_sampling_args(n: int, seed: int) -> None:
    if n < 1000:
        raise ValueError(f"n must be >= 1000, got {n}")
    if seed < 0:
        raise ValueError(f"seed must be a non-negative 64-bit integer, got {seed}")


def _block_sizes(n: int) -> List[int]:
    full, rest = divmod(n, BLOCK_SIZE)
    sizes = [BLOCK_SIZE] * full
    if rest:
        sizes.append(rest)
    return sizes


def _draw_block(pop: FailurePopulation, seed: int, block_index: int, size: int) -> np.ndarray:
    """Defect-count draws for one block; substream fixed by (seed, block_index)."""
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(block_index,)))
    return rng.binomial(pop.l, pop.p, size=size)


def _map_blocks(n: int, workers: int, block_fn: Callable[[int, int], object]) -> List[object]:
    """Apply block_fn(block_index, size) to every block, results in index order."""
    sizes = _block_sizes(n)
    if workers <= 1 or len(sizes) <= 1:
        return [block_fn(i, s) for i, s in enumerate(sizes)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(block_fn, i, s) for i, s in enumerate(sizes)]
        return [f.result() for f in futures]


def _kahan_sum(values: Sequence[float]) -> float:
    total = 0.0
    comp = 0.0
    for v in values:
        y = v - comp
        t = total + y
        comp = (t - total) - y
        total = t
    return total


def _tail_estimate(
    pop: FailurePopulation,
    threshold: float,
    n: int,
    seed: int,
    workers: int,
) -> MonteCarloEstimate:
    _validate_sampling_args(n, seed)
    if threshold <= 0.0:
        # X >= 0 almost surely; no sampling needed, degenerate interval.
        return MonteCarloEstimate(0.0, 0.0, 0.0, 0.0, n, seed, event_threshold=threshold)

    def block_fn(i: int, size: int) -> int:
        x = _draw_block(pop, seed, i, size)
        return int(np.count_nonzero(x < threshold))

    counts = _map_blocks(n, workers, block_fn)
    hits = sum(counts)
    p_hat = hits / n
    ci_low, ci_high = wilson_interval(hits, n)
    std_error = math.sqrt(p_hat * (1.0 - p_hat) / n)
    return MonteCarloEstimate(p_hat, std_error, ci_low, ci_high, n, seed, event_threshold=threshold)


def estimate_tail_probability(
    pop: FailurePopulation,
    threshold: float,
    n: int,
    seed: int,
    workers: int = 1,
) -> MonteCarloEstimate:
    """Fraction of n seeded defect-count draws with X < threshold, Wilson CI."""
    return _tail_estimate(pop, threshold, n, seed, workers)


def estimate_expected_reliability(
    model: CombinedHazardModel,
    t: float,
    n: int,
    seed: int,
    workers: int = 1,
) -> MonteCarloEstimate:
    """Mean SDP reliability over n seeded defect-count draws, normal CI."""
    _validate_sampling_args(n, seed)
    if not (t >= 0.0):
        raise ValueError(f"time t must be >= 0, got {t}")
    pop = model.population

    def block_fn(i: int, size: int) -> Tuple[float, float]:
        x = _draw_block(pop, seed, i, size)
        r = sdp_reliability(model, x, t)
        return float(np.sum(r)), float(np.sum(r * r))

    stats = _map_blocks(n, workers, block_fn)
    total = _kahan_sum([s[0] for s in stats])
    total_sq = _kahan_sum([s[1] for s in stats])
    mean = total / n
    variance = max(0.0, (total_sq - n * mean * mean) / (n - 1))
    std_error = math.sqrt(variance / n)
    half = _Z95 * std_error
    return MonteCarloEstimate(mean, std_error, mean - half, mean + half, n, seed)


def estimate_reliability_exceedance(
    model: CombinedHazardModel,
    manual: WeibullParams,
    t: float,
    n: int,
    seed: int,
    workers: int = 1,
) -> MonteCarloEstimate:
    """Fraction of draws whose SDP reliability exceeds the manual reliability.

    Exceedance of the reliability random variable is equivalent, through the
    strict monotonicity of exp, to the defect count falling below the
    reliability-comparison cutoff; the indicator is evaluated on that count
    scale so this estimator shares draws *and* indicators with
    estimate_tail_probability at the same seed.
    """
    if not (t > 0.0):
        raise ValueError(f"time t must be > 0, got {t}")
    threshold = reliability_event_threshold(manual, model.residual, t)
    return _tail_estimate(model.population, threshold, n, seed, workers)


def tail_event_indicators(
    pop: FailurePopulation,
    threshold: float,
    n: int,
    seed: int,
) -> np.ndarray:
    """Materialized per-draw indicators (X < threshold) for the block scheme.

    Test hook: reproduces exactly the indicators the tail estimators count.
    """
    _validate_sampling_args(n, seed)
    parts = [
        _draw_block(pop, seed, i, size) < threshold
        for i, size in enumerate(_block_sizes(n))
    ]
    return np.concatenate(parts)


def audit_bound(
    report: BoundReport,
    empirical: Union[MonteCarloEstimate, float],
) -> AuditVerdict:
    """Compare a bound report with the event probability (exact or estimated).

    Exact probabilities bypass interval logic.  Impossible events (cutoff <= 0
    while X >= 0) short-circuit to the exact-zero-event verdict; a nonzero
    empirical value for such an event means the inputs describe different
    events and raises.
    """
    bound = report.bound

    if isinstance(empirical, MonteCarloEstimate):
        if (
            empirical.event_threshold is not None
            and empirical.event_threshold != report.event_threshold
        ):
            raise ValueError(
                f"event mismatch: report cutoff {report.event_threshold} vs "
                f"estimate cutoff {empirical.event_threshold}"
            )
        value = empirical.estimate
        ci_low, ci_high = empirical.ci_low, empirical.ci_high
        exact = False
        estimate: Optional[MonteCarloEstimate] = empirical
    else:
        value = float(empirical)
        ci_low = ci_high = value
        exact = True
        estimate = None

    if report.event_threshold <= 0.0:
        if value != 0.0:
            raise ValueError(
                f"event mismatch: cutoff {report.event_threshold} makes the event "
                f"impossible but the empirical probability is {value}"
            )
        return AuditVerdict(VERDICT_EXACT_ZERO, bound, 0.0, bound, exact, estimate)

    if exact:
        verdict = VERDICT_VIOLATED if value > bound else VERDICT_HOLDS
    elif ci_low > bound:
        verdict = VERDICT_VIOLATED
    elif ci_high <= bound:
        verdict = VERDICT_HOLDS
    else:
        verdict = VERDICT_INCONCLUSIVE
    return AuditVerdict(verdict, bound, value, bound - ci_high, exact, estimate)
