"""Shared test helpers: independent brute-force oracles and case generators.

The brute-force functions here deliberately avoid the library's counting
kernels and enumeration code, so equality tests compare two separate
implementations.
"""

import itertools
from fractions import Fraction

import numpy as np
import pytest

from desinv import Alphabet, Multiset, Ordering, SymbolSequence, build_pair_tables


def brute_inversions(values, ranks):
    """O(n^2) inversion count of a value sequence under a rank table."""
    r = [ranks[v] for v in values]
    n = len(r)
    return sum(1 for i in range(n) for j in range(i + 1, n) if r[i] > r[j])


def brute_descents(values, ranks):
    r = [ranks[v] for v in values]
    return sum(1 for i in range(len(r) - 1) if r[i] > r[i + 1])


def compositions(total_max, parts_max):
    """All positive-count tuples with sum <= total_max and length <= parts_max."""
    for n in range(1, total_max + 1):
        for h in range(1, parts_max + 1):
            for cuts in itertools.combinations(range(1, n), h - 1):
                edges = (0,) + cuts + (n,)
                yield tuple(edges[i + 1] - edges[i] for i in range(h))


def partitions(n, max_parts, smallest=1):
    """Nondecreasing positive-count tuples summing to n, at most max_parts."""
    if n == 0:
        yield ()
        return
    if max_parts == 0:
        return
    for first in range(smallest, n + 1):
        for rest in partitions(n - first, max_parts - 1, first):
            yield (first,) + rest


def brute_arrangements(counts):
    """Every distinct arrangement of the counts, sorted, via itertools."""
    base = []
    for value, c in enumerate(counts):
        base.extend([value] * c)
    return sorted(set(itertools.permutations(base)))


def brute_law(counts, statistic):
    """Exact statistic law by independent enumeration, as value -> Fraction."""
    identity = list(range(len(counts)))
    arrs = brute_arrangements(counts)
    tally = {}
    for arr in arrs:
        if statistic == "inversions":
            w = brute_inversions(arr, identity)
        else:
            w = brute_descents(arr, identity)
        tally[w] = tally.get(w, 0) + 1
    return {w: Fraction(c, len(arrs)) for w, c in sorted(tally.items())}


def law_moments(law):
    mean = sum((Fraction(w) * p for w, p in law.items()), Fraction(0))
    second = sum((Fraction(w * w) * p for w, p in law.items()), Fraction(0))
    return mean, second - mean * mean


def sequence_of(values, h=None):
    arr = np.asarray(values, dtype=np.int64)
    size = int(arr.max()) + 1 if h is None else h
    return SymbolSequence(Alphabet(str(i) for i in range(size)), data=arr)


@pytest.fixture(scope="session")
def warm_kernels():
    """Trigger kernel compilation once so timed tests measure steady state."""
    seq = sequence_of([0, 1, 2, 1, 0, 2, 2, 1])
    build_pair_tables(seq)
    from desinv import conditional_mean_shift, count_inversions

    count_inversions(seq, Ordering.identity(3))
    conditional_mean_shift(np.array([0, 1, 0, 1], dtype=np.int64), "inversions")
    conditional_mean_shift(np.array([0, 1, 0, 1], dtype=np.int64), "descents")
    arr = np.tile(np.array([0, 1], dtype=np.int64), 40)
    conditional_mean_shift(arr, "descents")
    return True
