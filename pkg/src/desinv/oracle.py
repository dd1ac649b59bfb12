"""Brute-force ground truth by exhaustive enumeration.

Everything here trades time for certainty: distributions are exact rational
laws computed by walking every arrangement (and, for the coupling, every
random choice of the construction), so the fast implementations can be
tested against equality rather than tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, Tuple

import numpy as np

from ._kernels import inv_chunk
from .core_stats import Alphabet, Multiset, SymbolSequence
from .coupling import exchange_positions
from .errors import CapacityError, DegenerateError, InputError, ValidationError

ENUMERATION_GUARD = 10**7
COUPLING_GUARD_N = 6
COUPLING_GUARD_H = 3
CLASSICAL_GUARD_N = 100


@dataclass(frozen=True)
class ExactDistribution:
    """Probability law on non-negative integers with exact rational masses."""

    support: Dict[int, Fraction]

    def __post_init__(self):
        total = Fraction(0)
        for value, prob in self.support.items():
            if value < 0:
                raise ValidationError("support values must be non-negative")
            if prob < 0:
                raise ValidationError("probabilities must be non-negative")
            total += prob
        if total != 1:
            raise ValidationError("probabilities must sum to exactly 1")

    def probability(self, value: int) -> Fraction:
        return self.support.get(value, Fraction(0))

    def mean(self) -> Fraction:
        return sum((Fraction(v) * p for v, p in self.support.items()), Fraction(0))

    def second_moment(self) -> Fraction:
        return sum((Fraction(v * v) * p for v, p in self.support.items()), Fraction(0))

    def variance(self) -> Fraction:
        m = self.mean()
        return self.second_moment() - m * m


def multinomial(multiset: Multiset) -> int:
    """Number of distinct arrangements, n! / prod n_a!."""
    out = math.factorial(multiset.n)
    for c in multiset.counts:
        out //= math.factorial(c)
    return out


def _arrangements(multiset: Multiset) -> Iterator[np.ndarray]:
    # lexicographic next-permutation walk starting from the sorted arrangement
    arr = np.repeat(
        np.arange(multiset.size, dtype=np.int64),
        np.asarray(multiset.counts, dtype=np.int64),
    )
    n = arr.size
    while True:
        yield arr.copy()
        k = n - 2
        while k >= 0 and arr[k] >= arr[k + 1]:
            k -= 1
        if k < 0:
            return
        l = n - 1
        while arr[l] <= arr[k]:
            l -= 1
        arr[k], arr[l] = arr[l], arr[k]
        arr[k + 1 :] = arr[k + 1 :][::-1]


def _check_enumeration_guard(multiset: Multiset) -> int:
    count = multinomial(multiset)
    if count > ENUMERATION_GUARD:
        raise CapacityError(
            f"{count} arrangements exceed the enumeration guard ({ENUMERATION_GUARD})"
        )
    return count


def enumerate_permutations(multiset: Multiset) -> Iterator[SymbolSequence]:
    """Every distinct arrangement exactly once, lexicographically."""
    _check_enumeration_guard(multiset)
    alphabet = Alphabet(str(i) for i in range(multiset.size))

    def _gen():
        for arr in _arrangements(multiset):
            yield SymbolSequence(alphabet, data=arr)

    return _gen()


def _statistic_value(arr: np.ndarray, h: int, statistic: str) -> int:
    if statistic == "inversions":
        return int(inv_chunk(arr, np.zeros(h, dtype=np.int64)))
    if statistic == "descents":
        return int(np.count_nonzero(arr[:-1] > arr[1:]))
    raise InputError(f"unknown statistic {statistic!r}")


def exact_distribution(multiset: Multiset, statistic: str) -> ExactDistribution:
    """Exact law of the statistic under a uniform random arrangement."""
    count = _check_enumeration_guard(multiset)
    h = multiset.size
    tally: Dict[int, int] = {}
    for arr in _arrangements(multiset):
        w = _statistic_value(arr, h, statistic)
        tally[w] = tally.get(w, 0) + 1
    return ExactDistribution(
        {w: Fraction(c, count) for w, c in sorted(tally.items())}
    )


def size_biased_law(dist: ExactDistribution) -> ExactDistribution:
    """The W-size-biased law P*(w) = w P(W=w) / E W of a given law."""
    mean = dist.mean()
    if mean == 0:
        raise DegenerateError("size-biased law undefined for a mean-zero statistic")
    return ExactDistribution(
        {
            w: Fraction(w) * p / mean
            for w, p in sorted(dist.support.items())
            if w > 0 and p > 0
        }
    )


def exact_size_biased_distribution(
    multiset: Multiset, statistic: str
) -> ExactDistribution:
    """Size-biased law of the statistic, directly from its exact law."""
    return size_biased_law(exact_distribution(multiset, statistic))


def exact_coupling_distribution(multiset: Multiset, statistic: str) -> ExactDistribution:
    """Exact law of w_star under the full coupling construction.

    Enumerates the whole probability tree (arrangement, index pair, value
    pair, starred positions) with integer weights over the common
    denominator #arrangements * #index pairs * total value-pair weight, so
    the result is exact.  Must equal the size-biased law; that equality is
    the headline test of this module.
    """
    n = multiset.n
    h = multiset.size
    if n > COUPLING_GUARD_N or h > COUPLING_GUARD_H:
        raise CapacityError(
            f"coupling tree enumeration is guarded to n <= {COUPLING_GUARD_N}, "
            f"h <= {COUPLING_GUARD_H}"
        )
    if n < 2:
        raise InputError("coupling requires n >= 2")
    if statistic == "inversions":
        index_pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    elif statistic == "descents":
        index_pairs = [(i, i + 1) for i in range(n - 1)]
    else:
        raise InputError(f"unknown statistic {statistic!r}")
    s_total = 0
    for a in range(h):
        for b in range(a):
            s_total += multiset.counts[a] * multiset.counts[b]
    if s_total == 0:
        raise DegenerateError("single-symbol multiset has no size-biased coupling")
    count = _check_enumeration_guard(multiset)

    tally: Dict[int, int] = {}
    for arr in _arrangements(multiset):
        for (i, j) in index_pairs:
            if arr[i] > arr[j]:
                # inverted index pair keeps the arrangement; its whole
                # value-pair subtree collapses into weight s_total
                w = _statistic_value(arr, h, statistic)
                tally[w] = tally.get(w, 0) + s_total
                continue
            for s in range(n):
                for t in range(n):
                    if arr[s] <= arr[t]:
                        continue
                    starred = exchange_positions(arr, i, j, s, t)
                    w = _statistic_value(starred, h, statistic)
                    tally[w] = tally.get(w, 0) + 1
    denom = count * len(index_pairs) * s_total
    return ExactDistribution(
        {w: Fraction(c, denom) for w, c in sorted(tally.items())}
    )


def classical_inversion_distribution(n: int) -> ExactDistribution:
    """Exact inversion law for n distinct elements, by convolution.

    The inversion count is a sum of independent uniforms on {0..i}; the
    convolution is carried out on integer coefficients with a sliding-window
    prefix sum, then normalized by n!.
    """
    if n < 1:
        raise InputError("n must be positive")
    if n > CLASSICAL_GUARD_N:
        raise CapacityError(
            f"classical law is guarded to n <= {CLASSICAL_GUARD_N}"
        )
    coeffs = [1]
    for width in range(2, n + 1):
        # multiply by 1 + x + ... + x^(width-1)
        prefix = [0]
        for c in coeffs:
            prefix.append(prefix[-1] + c)
        out_len = len(coeffs) + width - 1
        new = [0] * out_len
        for k in range(out_len):
            hi = min(k, len(coeffs) - 1)
            lo = max(0, k - width + 1)
            new[k] = prefix[hi + 1] - prefix[lo]
        coeffs = new
    total = math.factorial(n)
    return ExactDistribution(
        {k: Fraction(c, total) for k, c in enumerate(coeffs) if c}
    )
