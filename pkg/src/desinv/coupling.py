"""Size-bias couplings for inversion and descent counts, with diagnostics.

The coupling draws a uniform arrangement pi, picks an index pair I (uniform
over position pairs for inversions, adjacent positions for descents), and if
I is not already inverted, exchanges the pair with positions (i*, j*) of a
value pair J = (a, b), a > b, chosen with probability proportional to
n_a * n_b.  The returned second statistic value then has the size-biased
law of the statistic.  Diagnostics compute the conditional mean shift
E(W* - W | pi) exactly and estimate its variance, the quantity the explicit
normal-approximation bounds consume.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from ._kernels import _exchange_targets_py, inv_chunk, shift_sum
from .core_stats import Multiset, SymbolSequence
from .errors import CapacityError, DegenerateError, InputError, ValidationError
from .moments import normal_cdf

# exhaustive shift enumeration is O(n^2 * branches); these defaults keep the
# default API comfortably interactive, max_n overrides at the caller's cost
SHIFT_GUARD = {"inversions": 40, "descents": 200}


class RandomSource:
    """Reproducible, splittable random stream keyed by (seed, stream).

    Identical (seed, stream) pairs give identical draw sequences; distinct
    stream ids give statistically independent streams of the same seed.
    """

    def __init__(self, seed: int, stream: int = 0):
        if not (0 <= int(seed) < 2**64):
            raise InputError("seed must fit in 64 bits")
        if not (0 <= int(stream) < 2**64):
            raise InputError("stream must fit in 64 bits")
        self.seed = int(seed)
        self.stream = int(stream)
        self._gen: Optional[np.random.Generator] = None

    @property
    def generator(self) -> np.random.Generator:
        if self._gen is None:
            seq = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream,))
            self._gen = np.random.default_rng(seq)
        return self._gen

    def spawn(self, stream: int) -> "RandomSource":
        """Fresh source with the same seed and a different stream id."""
        return RandomSource(self.seed, stream)


RngLike = Union[RandomSource, np.random.Generator]


def _as_generator(rng: RngLike) -> np.random.Generator:
    if isinstance(rng, RandomSource):
        return rng.generator
    if isinstance(rng, np.random.Generator):
        return rng
    raise InputError("rng must be a RandomSource or numpy Generator")


@dataclass(frozen=True)
class CouplingOutcome:
    """One coupled draw (w, w_star) with the randomness that produced it.

    j_pair, istar, jstar are None when the index pair was already inverted,
    in which case w_star equals w.
    """

    w: int
    w_star: int
    i_pair: Tuple[int, int]
    j_pair: Optional[Tuple[int, int]]
    istar: Optional[int]
    jstar: Optional[int]

    @property
    def shift(self) -> int:
        return self.w_star - self.w


def _base_array(multiset: Multiset) -> np.ndarray:
    return np.repeat(
        np.arange(multiset.size, dtype=np.int64),
        np.asarray(multiset.counts, dtype=np.int64),
    )


def sample_uniform_permutation(multiset: Multiset, rng: RngLike) -> SymbolSequence:
    """Uniformly random arrangement of the multiset as a SymbolSequence."""
    from .core_stats import Alphabet

    gen = _as_generator(rng)
    arr = gen.permutation(_base_array(multiset))
    alphabet = Alphabet(str(i) for i in range(multiset.size))
    return SymbolSequence(alphabet, data=arr)


def _value_pair_weights(multiset: Multiset) -> Tuple[List[Tuple[int, int]], List[int], int]:
    pairs = []
    weights = []
    total = 0
    for a in range(multiset.size):
        na = multiset.counts[a]
        if na == 0:
            continue
        for b in range(a):
            nb = multiset.counts[b]
            if nb == 0:
                continue
            pairs.append((a, b))
            weights.append(na * nb)
            total += na * nb
    return pairs, weights, total


def exchange_positions(arr: np.ndarray, i: int, j: int, s: int, t: int) -> np.ndarray:
    """Arrangement after the coupling exchange of (i, j) with (s, t).

    Positions s and t hold the chosen higher and lower values; the case split
    keeps the multiset intact when the chosen positions collide with (i, j).
    """
    pos = np.empty(4, dtype=np.int64)
    val = np.empty(4, dtype=np.int64)
    m = _exchange_targets_py(arr, i, j, s, t, pos, val)
    out = arr.copy()
    for u in range(m):
        out[pos[u]] = val[u]
    return out


def _count_statistic(arr: np.ndarray, h: int, statistic: str) -> int:
    if statistic == "inversions":
        return int(inv_chunk(arr, np.zeros(h, dtype=np.int64)))
    return int(np.count_nonzero(arr[:-1] > arr[1:]))


def _check_statistic(statistic: str) -> None:
    if statistic not in SHIFT_GUARD:
        raise InputError(f"unknown statistic {statistic!r}")


def _sample_coupling(multiset: Multiset, rng: RngLike, statistic: str) -> CouplingOutcome:
    gen = _as_generator(rng)
    n = multiset.n
    if n < 2:
        raise InputError("coupling requires n >= 2")
    pairs, weights, total = _value_pair_weights(multiset)
    if total == 0:
        raise DegenerateError(
            "single-symbol multiset: the statistic is identically zero and has "
            "no size-biased version"
        )
    arr = gen.permutation(_base_array(multiset))
    h = multiset.size
    w = _count_statistic(arr, h, statistic)

    if statistic == "inversions":
        i, j = sorted(int(q) for q in gen.choice(n, size=2, replace=False))
    else:
        i = int(gen.integers(0, n - 1))
        j = i + 1

    if arr[i] > arr[j]:
        outcome = CouplingOutcome(
            w=w, w_star=w, i_pair=(i, j), j_pair=None, istar=None, jstar=None
        )
    else:
        # exact integer thresholds, so pair probabilities are n_a n_b / total
        k = int(gen.integers(0, total))
        acc = 0
        pick = pairs[-1]
        for pair, wt in zip(pairs, weights):
            acc += wt
            if k < acc:
                pick = pair
                break
        a, b = pick
        pos_a = np.flatnonzero(arr == a)
        pos_b = np.flatnonzero(arr == b)
        istar = int(pos_a[int(gen.integers(0, pos_a.size))])
        jstar = int(pos_b[int(gen.integers(0, pos_b.size))])
        starred = exchange_positions(arr, i, j, istar, jstar)
        w_star = _count_statistic(starred, h, statistic)
        outcome = CouplingOutcome(
            w=w, w_star=w_star, i_pair=(i, j), j_pair=(a, b), istar=istar, jstar=jstar
        )

    limit = 4 * n if statistic == "inversions" else 8
    if abs(outcome.shift) > limit:
        raise ValidationError(
            f"coupling shift {outcome.shift} exceeds the guaranteed bound {limit}"
        )
    return outcome


def sample_inversion_coupling(multiset: Multiset, rng: RngLike) -> CouplingOutcome:
    """One draw of the inversion size-bias coupling; |shift| <= 4n."""
    return _sample_coupling(multiset, rng, "inversions")


def sample_descent_coupling(multiset: Multiset, rng: RngLike) -> CouplingOutcome:
    """One draw of the descent size-bias coupling; |shift| <= 8."""
    return _sample_coupling(multiset, rng, "descents")


def _materialize(seq_or_array, statistic: str, max_n: Optional[int]) -> np.ndarray:
    limit = SHIFT_GUARD[statistic] if max_n is None else int(max_n)
    if isinstance(seq_or_array, SymbolSequence):
        parts = []
        total = 0
        for chunk in seq_or_array.chunks():
            total += int(chunk.size)
            if total > limit:
                raise CapacityError(
                    f"sequence length exceeds the {statistic} shift guard "
                    f"({limit}); pass max_n to raise it at quadratic cost"
                )
            parts.append(chunk)
        return np.ascontiguousarray(np.concatenate(parts))
    arr = np.ascontiguousarray(seq_or_array, dtype=np.int64)
    if arr.ndim != 1 or arr.size == 0:
        raise InputError("sequence must be one-dimensional and non-empty")
    if arr.size > limit:
        raise CapacityError(
            f"sequence length exceeds the {statistic} shift guard "
            f"({limit}); pass max_n to raise it at quadratic cost"
        )
    if int(arr.min()) < 0:
        raise InputError("sequence values must be non-negative")
    return arr


def conditional_mean_shift(
    seq, statistic: str, max_n: Optional[int] = None
) -> Fraction:
    """E(W* - W | pi) for the fixed arrangement, as an exact rational.

    Enumerates every coupling choice: each non-inverted index pair I
    contributes the statistic change of the exchange with every inverted
    position pair, weighted 1/(#I * total); inverted I contribute zero.
    seq may be a SymbolSequence or an integer array of values.  Guarded by
    SHIFT_GUARD per statistic; max_n overrides the guard.
    """
    _check_statistic(statistic)
    arr = _materialize(seq, statistic, max_n)
    n = int(arr.size)
    if n < 2:
        raise InputError("conditional mean shift requires n >= 2")
    counts = np.bincount(arr)
    multiset = Multiset(int(c) for c in counts)
    _, _, total = _value_pair_weights(multiset)
    if total == 0:
        raise DegenerateError(
            "single-symbol multiset: the statistic is identically zero and has "
            "no size-biased version"
        )
    num_i = n * (n - 1) // 2 if statistic == "inversions" else n - 1
    raw = shift_sum(arr, statistic)
    return Fraction(raw, num_i * total)


def estimate_varE(
    multiset: Multiset,
    statistic: str,
    replicates: int,
    rng: RngLike,
    max_n: Optional[int] = None,
) -> Tuple[float, float]:
    """Sample variance of E(W* - W | pi) over uniform pi, with jackknife SE.

    Draws `replicates` independent arrangements, evaluates the exact
    conditional mean shift on each, and returns the unbiased sample variance
    together with its leave-one-out jackknife standard error.  Needs at
    least 3 replicates for the jackknife to be defined.
    """
    _check_statistic(statistic)
    if replicates < 3:
        raise InputError("estimate_varE needs at least 3 replicates")
    gen = _as_generator(rng)
    base = _base_array(multiset)
    limit = SHIFT_GUARD[statistic] if max_n is None else int(max_n)
    if base.size > limit:
        raise CapacityError(
            f"n = {base.size} exceeds the {statistic} shift guard ({limit}); "
            "pass max_n to raise it at quadratic cost"
        )
    vals = np.empty(replicates, dtype=np.float64)
    for r in range(replicates):
        arr = gen.permutation(base)
        vals[r] = float(conditional_mean_shift(arr, statistic, max_n=limit))
    est = float(np.var(vals, ddof=1))
    # leave-one-out variances from running sums, then the jackknife spread
    R = replicates
    s1 = float(vals.sum())
    s2 = float((vals * vals).sum())
    loo = np.empty(R, dtype=np.float64)
    for r in range(R):
        x = float(vals[r])
        m1 = (s1 - x) / (R - 1)
        loo[r] = (s2 - x * x - (R - 1) * m1 * m1) / (R - 2)
    se = math.sqrt((R - 1) / R * float(((loo - loo.mean()) ** 2).sum()))
    return est, se


def ks_distance(samples: Sequence[float], mu: float, sigma: float) -> float:
    """Sup distance between the empirical law of (x - mu)/sigma and normal."""
    if sigma <= 0:
        raise InputError("sigma must be positive")
    arr = np.asarray(samples, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise InputError("samples must be a non-empty one-dimensional collection")
    z = np.sort((arr - mu) / sigma)
    cdf = np.array([normal_cdf(float(v)) for v in z])
    N = arr.size
    hi = np.arange(1, N + 1, dtype=np.float64) / N
    lo = np.arange(0, N, dtype=np.float64) / N
    return float(max(np.max(hi - cdf), np.max(cdf - lo)))
