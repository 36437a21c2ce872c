"""Overflow-safe evaluation of the structure function and series terms.

The coherent-state series for a power-law potential with exponent ``k`` is
built from the structure function

    g(n, k) = prod_{j=1}^{n} [(j + gamma/4)^alpha - (gamma/4)^alpha],
    alpha = 2k / (k + 2),

which replaces n! of the harmonic-oscillator case (k = 2 gives alpha = 1
and g = n! exactly).  Terms |z|^{2n} / g(n, k) overflow native floats long
before the series converges for large |z|, so everything here works with
logarithms: ln g is accumulated incrementally and terms are represented as
ln term = 2n ln|z| - ln g(n, k).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

__all__ = [
    "PotentialParams",
    "LogTermSequence",
    "characteristic_exponent",
    "log_g_increment",
    "log_g",
    "log_term",
    "log_sum_exp",
]

# Below this ratio of (gamma/4)^alpha to (j + gamma/4)^alpha the subtraction
# inside ln is replaced by an explicit log1p correction.
_DIRECT_RATIO_FLOOR = 1e-17


@dataclass(frozen=True)
class PotentialParams:
    """Physics inputs: power-law exponent k and spectral offset gamma.

    gamma enters only through gamma/4; the default gamma = 2 puts the
    offset at 1/2 (the standard two-turning-point value).
    """

    k: float
    gamma: float = 2.0

    def __post_init__(self):
        if not (self.k > 0 and math.isfinite(self.k)):
            raise ValueError(f"k must be a positive finite real, got {self.k}")
        if not (self.gamma > 0 and math.isfinite(self.gamma)):
            raise ValueError(f"gamma must be a positive finite real, got {self.gamma}")

    @property
    def alpha(self) -> float:
        return characteristic_exponent(self)

    @property
    def offset(self) -> float:
        return 0.25 * self.gamma


def characteristic_exponent(params: PotentialParams) -> float:
    """alpha = 2k / (k + 2), strictly increasing in k with range (0, 2)."""
    return 2.0 * params.k / (params.k + 2.0)


def log_g_increment(j: int, params: PotentialParams) -> float:
    """ln of the j-th product factor, ln[(j + gamma/4)^alpha - (gamma/4)^alpha].

    The factor is strictly positive for every j >= 1, so the result is
    always finite.  When the subtrahend is negligible the subtraction is
    rewritten through log1p to keep full precision.
    """
    if j < 1:
        raise ValueError(f"factor index must be >= 1, got {j}")
    a = characteristic_exponent(params)
    c = params.offset
    big = (j + c) ** a
    small = c ** a
    if small >= _DIRECT_RATIO_FLOOR * big:
        return math.log(big - small)
    return a * math.log(j + c) + math.log1p(-small / big)


def log_g(n: int, params: PotentialParams) -> float:
    """ln g(n, k), the sum of the first n factor logarithms; 0 for n = 0."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    total = 0.0
    for j in range(1, n + 1):
        total += log_g_increment(j, params)
    return total


def log_term(n: int, log_abs_z: float, params: PotentialParams) -> float:
    """ln of the series term |z|^{2n} / g(n, k), i.e. 2n ln|z| - ln g(n, k).

    Stays finite for n well beyond 10^6 even where |z|^{2n} itself is far
    outside native float range.  |z| = 0 is only meaningful for n = 0
    (the term is 1); for n >= 1 the term is exactly zero and callers must
    short-circuit instead of asking for its logarithm.
    """
    if n == 0:
        return 0.0
    if log_abs_z == -math.inf:
        raise ValueError("term is exactly zero for |z| = 0 and n >= 1; "
                         "short-circuit instead of taking its logarithm")
    return 2.0 * n * log_abs_z - log_g(n, params)


@dataclass
class LogTermSequence:
    """Growable cache of ln g(n, k) supporting O(1) extension per term.

    Single-writer: extending requires exclusive access, but a frozen
    sequence may be read concurrently.
    """

    log_z2: float
    params: PotentialParams
    cumulative_log_g: list[float] = field(default_factory=lambda: [0.0])

    def extend_to(self, n: int) -> None:
        while len(self.cumulative_log_g) <= n:
            j = len(self.cumulative_log_g)
            self.cumulative_log_g.append(
                self.cumulative_log_g[-1] + log_g_increment(j, self.params)
            )

    def log_g(self, n: int) -> float:
        self.extend_to(n)
        return self.cumulative_log_g[n]

    def log_term(self, n: int) -> float:
        if n == 0:
            return 0.0
        return n * self.log_z2 - self.log_g(n)


def log_sum_exp(values) -> float:
    """ln of the sum of exp(x) over the inputs, via running-maximum rescaling.

    The rescaled exponentials are accumulated with compensated summation
    (math.fsum), so the result is permutation-invariant and exact to within
    the final rounding.  -inf inputs are treated as exp(x) = 0.
    """
    xs = [x for x in values]
    if not xs:
        raise ValueError("log_sum_exp of an empty stream")
    m = max(xs)
    if m == -math.inf:
        return -math.inf
    if math.isinf(m):
        return m
    return m + math.log(math.fsum(math.exp(x - m) for x in xs))
