"""Exact counts of the degree-capped monomial sets behind every bound.

Everything here is integer/rational arithmetic: thresholds such as k/m or
n(t-1)/s are carried as :class:`fractions.Fraction` and compared exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence, Union

Rational = Union[int, Fraction]


def binomial(a: int, b: int) -> int:
    if a < 0 or b < 0:
        raise ValueError("binomial arguments must be non-negative")
    return math.comb(a, b)


def count_D(n: int, k: int) -> int:
    """|D(n, k)|: monomials in n variables of total degree <= k."""
    if n < 1 or k < 0:
        raise ValueError("need n >= 1 and k >= 0")
    return binomial(n + k, n)


def floor_threshold(threshold: Union[Rational, float]) -> int:
    if isinstance(threshold, float):
        if math.isinf(threshold):
            raise ValueError("infinite threshold has no floor; use None")
        threshold = Fraction(threshold)
    return math.floor(Fraction(threshold))


@dataclass(frozen=True)
class CountQuery:
    """Exponent vectors bounded by ``caps`` with total at most ``threshold``.

    ``threshold=None`` means no degree constraint.
    """

    caps: tuple[int, ...]
    threshold: Union[Fraction, None] = None

    def __post_init__(self):
        if any(c < 0 for c in self.caps):
            raise ValueError("caps must be non-negative")
        if self.threshold is not None:
            object.__setattr__(self, "threshold", Fraction(self.threshold))

    @classmethod
    def uniform(cls, n: int, t: int, threshold=None) -> "CountQuery":
        return cls((t - 1,) * n, threshold)

    @property
    def n(self) -> int:
        return len(self.caps)


def _capped_sum_counts(caps: Sequence[int], limit: int) -> list[int]:
    """ways[s] = #{v : 0 <= v_i <= caps[i], sum v = s} for s <= limit."""
    ways = [1] + [0] * limit
    for cap in caps:
        # sliding-window convolution with the all-ones vector of length cap+1
        prefix = [0]
        for w in ways:
            prefix.append(prefix[-1] + w)
        ways = [prefix[s + 1] - prefix[max(0, s - cap)] for s in range(limit + 1)]
    return ways


def count_capped_degree(query: CountQuery) -> int:
    total = sum(query.caps)
    if query.threshold is None:
        return math.prod(c + 1 for c in query.caps)
    T = floor_threshold(query.threshold)
    if T < 0:
        return 0
    T = min(T, total)
    return sum(_capped_sum_counts(query.caps, T))


def count_B_exact(n: int, s: Rational, t: int) -> int:
    """|B(n, s, t)| = #{v in {0..t-1}^n : sum v <= n(t-1)/s}."""
    if n < 1 or t < 2:
        raise ValueError("need n >= 1 and t >= 2")
    s = Fraction(s)
    if s <= 0:
        raise ValueError("s must be positive")
    return count_capped_degree(CountQuery.uniform(n, t, Fraction(n * (t - 1)) / s))


def enumerate_capped(caps: Sequence[int], max_deg: Union[Rational, None] = None) -> Iterator[tuple[int, ...]]:
    """Exponent vectors within caps (and total degree <= max_deg), lexicographic order."""
    T = None if max_deg is None else floor_threshold(max_deg)
    n = len(caps)
    vec = [0] * n

    def rec(i, budget):
        if i == n:
            yield tuple(vec)
            return
        hi = caps[i] if budget is None else min(caps[i], budget)
        for v in range(hi + 1):
            vec[i] = v
            yield from rec(i + 1, None if budget is None else budget - v)
        vec[i] = 0

    if T is not None and T < 0:
        return
    yield from rec(0, T)
