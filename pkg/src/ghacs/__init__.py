"""Photon-number statistics of generalized Heisenberg algebra coherent states
for power-law potentials, evaluated overflow-safely in the log domain."""

from .core import (LogTermSequence, PotentialParams, characteristic_exponent,
                   log_g, log_g_increment, log_sum_exp, log_term)
from .lab import (SweepRow, SweepSpec, ThresholdEstimateError, TruncationReport,
                  collapse_onset, estimate_threshold, run_sweep)
from .stats import (Classification, LogSeriesSums, StateStats, TruncationMode,
                    TruncationPolicy, VarianceConsistencyError, WeightDistribution,
                    accumulate_sums, classify, state_stats, weight_distribution)

__version__ = "0.1.0"

__all__ = [
    "PotentialParams", "LogTermSequence", "characteristic_exponent",
    "log_g_increment", "log_g", "log_term", "log_sum_exp",
    "TruncationMode", "TruncationPolicy", "LogSeriesSums", "StateStats",
    "WeightDistribution", "Classification", "VarianceConsistencyError",
    "accumulate_sums", "state_stats", "weight_distribution", "classify",
    "SweepSpec", "SweepRow", "TruncationReport", "ThresholdEstimateError",
    "estimate_threshold", "run_sweep", "collapse_onset",
]
