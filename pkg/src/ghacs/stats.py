"""Normalization, weighting distribution, moments and Mandel Q.

All quantities derive from three raw sums over the same term stream,

    S_m = sum_n n^m |z|^{2n} / g(n, k),   m = 0, 1, 2,

accumulated in the log domain under a truncation policy: either a fixed
cutoff n_max, or adaptive stopping once the terms of the m = 2 sum (the
slowest to converge) stay below a relative significance threshold for a
sustained run.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .core import PotentialParams, log_g_increment, log_sum_exp

__all__ = [
    "TruncationMode",
    "TruncationPolicy",
    "LogSeriesSums",
    "StateStats",
    "WeightDistribution",
    "Classification",
    "VarianceConsistencyError",
    "accumulate_sums",
    "state_stats",
    "weight_distribution",
    "classify",
]

# Rounding can push the computed variance slightly negative; anything below
# this floor is a logic error rather than noise.
_VARIANCE_FLOOR = -1e-9


class VarianceConsistencyError(RuntimeError):
    """Variance came out more negative than rounding can explain."""


class TruncationMode(enum.Enum):
    FIXED = "fixed"
    ADAPTIVE = "adaptive"


@dataclass(frozen=True)
class TruncationPolicy:
    """Fixed cutoff vs tolerance-driven adaptive truncation.

    Adaptive mode stops after ``quiet_run`` consecutive terms whose
    relative contribution falls below ``tail_tolerance``, with
    ``hard_cap`` as a safety bound on the number of terms.
    """

    mode: TruncationMode
    n_max: int | None = None
    tail_tolerance: float = 1e-16
    quiet_run: int = 10
    hard_cap: int = 10 ** 6

    def __post_init__(self):
        if self.mode is TruncationMode.FIXED:
            if self.n_max is None or self.n_max < 1:
                raise ValueError("fixed mode requires n_max >= 1")
        else:
            if not (0.0 < self.tail_tolerance < 1.0):
                raise ValueError("tail_tolerance must lie in (0, 1)")
            if self.quiet_run < 1:
                raise ValueError("quiet_run must be >= 1")
            if self.hard_cap < self.quiet_run:
                raise ValueError("hard_cap must be >= quiet_run")

    @classmethod
    def fixed(cls, n_max: int) -> "TruncationPolicy":
        return cls(mode=TruncationMode.FIXED, n_max=n_max)

    @classmethod
    def adaptive(cls, tail_tolerance: float = 1e-16, quiet_run: int = 10,
                 hard_cap: int = 10 ** 6) -> "TruncationPolicy":
        return cls(mode=TruncationMode.ADAPTIVE, tail_tolerance=tail_tolerance,
                   quiet_run=quiet_run, hard_cap=hard_cap)


@dataclass(frozen=True)
class LogSeriesSums:
    """The three log-domain raw sums plus the truncation record.

    log_s1/log_s2 are -inf when only the n = 0 term survives (|z| = 0).
    converged is True only for adaptive runs whose quiet-run criterion
    fired before the hard cap; estimated_threshold is the first index of
    that quiet run.
    """

    log_s0: float
    log_s1: float
    log_s2: float
    terms_used: int
    converged: bool
    estimated_threshold: int | None = None


@dataclass(frozen=True)
class StateStats:
    """Mean, variance, Mandel Q and normalization of the photon-number distribution.

    mandel_q is None (undefined) when the mean vanishes: at |z| = 0 the
    variance-to-mean ratio is 0/0 and no limit is defined.
    """

    mean: float
    variance: float
    mandel_q: float | None
    normalization: float
    sums: LogSeriesSums


@dataclass(frozen=True)
class WeightDistribution:
    """ln P_n for n = 0 .. support_bound, normalized over the truncated support."""

    log_weights: list[float]
    support_bound: int

    def weight(self, n: int) -> float:
        if 0 <= n <= self.support_bound:
            return math.exp(self.log_weights[n])
        return 0.0

    def weights(self) -> list[float]:
        return [math.exp(w) for w in self.log_weights]


class Classification(enum.Enum):
    POISSONIAN = "poissonian"
    SUPER_POISSONIAN = "super-poissonian"
    SUB_POISSONIAN = "sub-poissonian"
    UNDEFINED = "undefined"


def _accumulate(abs_z: float, params: PotentialParams, policy: TruncationPolicy):
    """Shared single-pass accumulator; returns (LogSeriesSums, log term list)."""
    if abs_z < 0:
        raise ValueError(f"abs_z must be >= 0, got {abs_z}")

    if abs_z == 0.0:
        # Only n = 0 survives: S0 = 1, S1 = S2 = 0.
        sums = LogSeriesSums(
            log_s0=0.0, log_s1=-math.inf, log_s2=-math.inf, terms_used=1,
            converged=policy.mode is TruncationMode.ADAPTIVE,
            estimated_threshold=0 if policy.mode is TruncationMode.ADAPTIVE else None,
        )
        return sums, [0.0]

    log_z2 = 2.0 * math.log(abs_z)
    log_terms = [0.0]
    adaptive = policy.mode is TruncationMode.ADAPTIVE

    running_log_s2 = -math.inf
    quiet = 0
    threshold = None
    converged = False

    n = 0
    while True:
        n += 1
        if not adaptive and n > policy.n_max:
            break
        lt = log_terms[-1] + log_z2 - log_g_increment(n, params)
        log_terms.append(lt)

        if adaptive:
            lt2 = lt + 2.0 * math.log(n)
            if running_log_s2 == -math.inf:
                significant = True
            else:
                significant = math.exp(lt2 - running_log_s2) >= policy.tail_tolerance
            hi, lo = (lt2, running_log_s2) if lt2 > running_log_s2 else (running_log_s2, lt2)
            running_log_s2 = hi + math.log1p(math.exp(lo - hi))
            if significant:
                quiet = 0
                threshold = None
            else:
                if quiet == 0:
                    threshold = n
                quiet += 1
                if quiet >= policy.quiet_run:
                    converged = True
                    break
            if len(log_terms) >= policy.hard_cap:
                threshold = None
                break

    log_s0 = log_sum_exp(log_terms)
    log_s1 = log_sum_exp(lt + math.log(i) for i, lt in enumerate(log_terms) if i > 0)
    log_s2 = log_sum_exp(lt + 2.0 * math.log(i) for i, lt in enumerate(log_terms) if i > 0)
    sums = LogSeriesSums(
        log_s0=log_s0, log_s1=log_s1, log_s2=log_s2,
        terms_used=len(log_terms), converged=converged,
        estimated_threshold=threshold if converged else None,
    )
    return sums, log_terms


def accumulate_sums(abs_z: float, params: PotentialParams,
                    policy: TruncationPolicy) -> LogSeriesSums:
    """Accumulate S0, S1, S2 over one term stream under the truncation policy.

    An adaptive run that reaches hard_cap returns converged = False
    explicitly rather than a silently questionable number.
    """
    sums, _ = _accumulate(abs_z, params, policy)
    return sums


def state_stats(abs_z: float, params: PotentialParams,
                policy: TruncationPolicy) -> StateStats:
    """Mean, variance, Mandel Q and normalization from the accumulated sums."""
    sums = accumulate_sums(abs_z, params, policy)
    return stats_from_sums(sums)


def stats_from_sums(sums: LogSeriesSums) -> StateStats:
    mean = math.exp(sums.log_s1 - sums.log_s0) if sums.log_s1 != -math.inf else 0.0
    second = math.exp(sums.log_s2 - sums.log_s0) if sums.log_s2 != -math.inf else 0.0
    variance = second - mean * mean
    if variance < 0.0:
        if variance < _VARIANCE_FLOOR:
            raise VarianceConsistencyError(
                f"variance {variance} below rounding floor {_VARIANCE_FLOOR}")
        variance = 0.0
    mandel_q = variance / mean - 1.0 if mean > 0.0 else None
    normalization = math.exp(-0.5 * sums.log_s0)
    return StateStats(mean=mean, variance=variance, mandel_q=mandel_q,
                      normalization=normalization, sums=sums)


def weight_distribution(abs_z: float, params: PotentialParams,
                        policy: TruncationPolicy) -> WeightDistribution:
    """Normalized P_n over the truncated support: ln P_n = ln term_n - ln S0."""
    sums, log_terms = _accumulate(abs_z, params, policy)
    log_weights = [lt - sums.log_s0 for lt in log_terms]
    return WeightDistribution(log_weights=log_weights,
                              support_bound=len(log_weights) - 1)


def classify(stats: StateStats, tol: float) -> Classification:
    """Poissonian within tol of Q = 0, otherwise super/sub by sign; undefined Q maps through."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    q = stats.mandel_q
    if q is None:
        return Classification.UNDEFINED
    if abs(q) <= tol:
        return Classification.POISSONIAN
    return Classification.SUPER_POISSONIAN if q > 0 else Classification.SUB_POISSONIAN
