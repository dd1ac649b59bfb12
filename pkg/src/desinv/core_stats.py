"""Streaming descent, inversion, and pair-count computation for symbol sequences.

A sequence over a finite alphabet is read as a multiset permutation: an
ordering assigns each symbol a rank, descents are adjacent rank drops, and
inversions are ordered pairs of positions whose ranks drop.  Everything here
streams in bounded memory so genome-scale inputs work; pair-count tables are
the O(h^2) sufficient summary from which both statistics follow for every
ordering at once.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional, Sequence, Tuple

import numpy as np

from ._kernels import des_chunk, inv_chunk, pair_chunk
from .errors import InputError, ValidationError

# feeding kernels in bounded slices keeps every chunk-local int64 tally below
# 2**63 for any realistic n (bound is chunk_len * n per cell)
CHUNK_CAP = 1 << 22


@dataclass(frozen=True)
class Alphabet:
    """Ordered collection of distinct symbol labels."""

    symbols: Tuple[str, ...]

    def __init__(self, symbols: Iterable[str]):
        syms = tuple(str(s) for s in symbols)
        if len(syms) < 1:
            raise InputError("alphabet must contain at least one symbol")
        if len(set(syms)) != len(syms):
            raise InputError("alphabet symbols must be distinct")
        object.__setattr__(self, "symbols", syms)

    @classmethod
    def from_string(cls, text: str) -> "Alphabet":
        """Alphabet of single-character symbols, one per character of text."""
        return cls(tuple(text))

    @property
    def size(self) -> int:
        return len(self.symbols)

    def index(self, symbol: str) -> int:
        try:
            return self.symbols.index(symbol)
        except ValueError:
            raise InputError(f"symbol {symbol!r} not in alphabet") from None


@dataclass(frozen=True)
class Multiset:
    """Per-symbol counts n_a with total n = sum n_a > 0."""

    counts: Tuple[int, ...]

    def __init__(self, counts: Iterable[int]):
        cts = tuple(int(c) for c in counts)
        if not cts:
            raise InputError("multiset needs at least one count")
        if any(c < 0 for c in cts):
            raise InputError("multiset counts must be non-negative")
        if all(c == 0 for c in cts):
            raise InputError("multiset must contain at least one element")
        object.__setattr__(self, "counts", cts)

    @property
    def n(self) -> int:
        return sum(self.counts)

    @property
    def size(self) -> int:
        return len(self.counts)

    def power_sum(self, k: int) -> int:
        """Sum of n_a**k over symbols."""
        return sum(c**k for c in self.counts)


@dataclass(frozen=True)
class Ordering:
    """Bijection from alphabet index to rank; rank 0 is smallest."""

    ranks: Tuple[int, ...]

    def __init__(self, ranks: Iterable[int]):
        rks = tuple(int(r) for r in ranks)
        if sorted(rks) != list(range(len(rks))):
            raise InputError("ranks must be a bijection onto 0..h-1")
        object.__setattr__(self, "ranks", rks)

    @classmethod
    def identity(cls, h: int) -> "Ordering":
        return cls(range(h))

    @classmethod
    def from_symbol_order(cls, alphabet: Alphabet, order) -> "Ordering":
        """Ordering from symbols listed smallest first.

        order may be an iterable of symbols or a comma-separated string such
        as "A,C,G,T"; the leftmost symbol gets rank 0.
        """
        if isinstance(order, str):
            order = [tok.strip() for tok in order.split(",")]
        syms = list(order)
        if sorted(syms) != sorted(alphabet.symbols):
            raise InputError("ordering must list each alphabet symbol exactly once")
        ranks = [0] * alphabet.size
        for rank, sym in enumerate(syms):
            ranks[alphabet.index(sym)] = rank
        return cls(ranks)

    @property
    def size(self) -> int:
        return len(self.ranks)

    def rank_of(self, index: int) -> int:
        return self.ranks[index]

    def reverse(self) -> "Ordering":
        h = len(self.ranks)
        return Ordering(h - 1 - r for r in self.ranks)

    def label(self, alphabet: Alphabet) -> str:
        """Symbols listed smallest first, comma separated."""
        if alphabet.size != len(self.ranks):
            raise InputError("ordering size does not match alphabet")
        by_rank = sorted(range(len(self.ranks)), key=lambda i: self.ranks[i])
        return ",".join(alphabet.symbols[i] for i in by_rank)


class SymbolSequence:
    """Sequence of alphabet indices, held in memory or re-streamable.

    Pass data (array-like of indices) for in-memory sequences, or
    chunk_factory, a callable returning a fresh iterable of index arrays, for
    streaming sources that can be read more than once.
    """

    def __init__(
        self,
        alphabet: Alphabet,
        data=None,
        chunk_factory: Optional[Callable[[], Iterable[np.ndarray]]] = None,
    ):
        if (data is None) == (chunk_factory is None):
            raise InputError("provide exactly one of data or chunk_factory")
        self.alphabet = alphabet
        self._factory = chunk_factory
        self._n: Optional[int] = None
        if data is not None:
            arr = np.asarray(data, dtype=np.int64)
            if arr.ndim != 1:
                raise InputError("sequence data must be one-dimensional")
            if arr.size == 0:
                raise InputError("sequence must be non-empty")
            self._check_range(arr)
            self._data = arr
            self._n = int(arr.size)
        else:
            self._data = None

    @classmethod
    def from_text(cls, alphabet: Alphabet, text: str) -> "SymbolSequence":
        """Sequence from a string of single-character symbols."""
        if any(len(s) != 1 for s in alphabet.symbols):
            raise InputError("from_text requires single-character symbols")
        lut = np.full(256, -1, dtype=np.int64)
        for i, s in enumerate(alphabet.symbols):
            lut[ord(s)] = i
        raw = np.frombuffer(text.encode("latin-1"), dtype=np.uint8)
        arr = lut[raw]
        if (arr < 0).any():
            bad = chr(int(raw[int(np.argmax(arr < 0))]))
            raise InputError(f"symbol {bad!r} not in alphabet")
        return cls(alphabet, data=arr)

    def _check_range(self, arr: np.ndarray) -> None:
        if arr.size and (int(arr.min()) < 0 or int(arr.max()) >= self.alphabet.size):
            raise InputError("sequence contains an index outside the alphabet")

    @property
    def n(self) -> Optional[int]:
        """Length if known; streaming sequences learn it after a full pass."""
        return self._n

    def chunks(self) -> Iterator[np.ndarray]:
        """Yield validated int64 chunks of at most CHUNK_CAP elements."""
        total = 0
        if self._data is not None:
            for start in range(0, self._data.size, CHUNK_CAP):
                yield self._data[start : start + CHUNK_CAP]
            return
        for raw in self._factory():
            arr = np.asarray(raw, dtype=np.int64)
            if arr.ndim != 1:
                raise InputError("chunk_factory must yield one-dimensional arrays")
            self._check_range(arr)
            total += int(arr.size)
            for start in range(0, arr.size, CHUNK_CAP):
                yield arr[start : start + CHUNK_CAP]
        if total == 0:
            raise InputError("sequence must be non-empty")
        self._n = total

    def multiset(self) -> Multiset:
        counts = np.zeros(self.alphabet.size, dtype=np.int64)
        for chunk in self.chunks():
            counts += np.bincount(chunk, minlength=self.alphabet.size)
        return Multiset(int(c) for c in counts)


@dataclass(frozen=True)
class PairTables:
    """Adjacent and global pair counts of a sequence, plus symbol totals.

    adjacent[x][y] counts positions i with symbols (x, y) at (i, i+1);
    global_pairs[x][y] counts ordered position pairs i < j with symbols
    (x, y).  Counts are exact arbitrary-precision integers.  Segment breaks
    remove straddling pairs from adjacent counts only; global counts span
    the whole sequence.
    """

    adjacent: Tuple[Tuple[int, ...], ...]
    global_pairs: Tuple[Tuple[int, ...], ...]
    counts: Tuple[int, ...]
    n: int
    segment_breaks: int = 0

    @property
    def size(self) -> int:
        return len(self.counts)

    def multiset(self) -> Multiset:
        return Multiset(self.counts)

    def validate(self) -> None:
        """Raise ValidationError unless the tables are internally consistent."""
        h = len(self.counts)
        if len(self.adjacent) != h or len(self.global_pairs) != h:
            raise ValidationError("table size does not match counts length")
        if any(len(row) != h for row in self.adjacent) or any(
            len(row) != h for row in self.global_pairs
        ):
            raise ValidationError("tables must be square")
        if any(c < 0 for row in self.adjacent for c in row) or any(
            c < 0 for row in self.global_pairs for c in row
        ):
            raise ValidationError("pair counts must be non-negative")
        if self.n != sum(self.counts) or self.n < 1:
            raise ValidationError("n must equal the sum of symbol counts")
        adj_total = sum(c for row in self.adjacent for c in row)
        if adj_total != self.n - 1 - self.segment_breaks:
            raise ValidationError("adjacent total must be n - 1 - segment breaks")
        glob_total = sum(c for row in self.global_pairs for c in row)
        if glob_total != self.n * (self.n - 1) // 2:
            raise ValidationError("global total must be n choose 2")
        for x in range(h):
            nx = self.counts[x]
            if self.global_pairs[x][x] != nx * (nx - 1) // 2:
                raise ValidationError("global diagonal must be n_x choose 2")
            for y in range(x + 1, h):
                if self.global_pairs[x][y] + self.global_pairs[y][x] != nx * self.counts[y]:
                    raise ValidationError("global[x][y] + global[y][x] must be n_x * n_y")
        # adjacent counts can never exceed global counts off the diagonal
        for x in range(h):
            for y in range(h):
                cap = self.global_pairs[x][y] if x != y else self.global_pairs[x][x]
                if self.adjacent[x][y] > cap:
                    raise ValidationError("adjacent count exceeds global count")


class PairTableBuilder:
    """Incremental pair-table accumulator for chunked feeding.

    feed() accepts index chunks, mark_break() starts a new segment for
    adjacent counting, finish() returns PairTables.  Global tallies spill
    into Python integers after every chunk, so totals are exact beyond the
    int64 range.
    """

    def __init__(self, h: int):
        if h < 1:
            raise InputError("alphabet size must be at least 1")
        self.h = h
        self._cnt = np.zeros(h, dtype=np.int64)
        self._adj = np.zeros((h, h), dtype=np.int64)
        self._gt = [[0] * h for _ in range(h)]  # gt[y][x]: pairs (x before y)
        self._prev = -1
        self._n = 0
        self._breaks = 0
        self._pending_break = False

    def feed(self, chunk) -> None:
        arr = np.ascontiguousarray(chunk, dtype=np.int64)
        if arr.ndim != 1:
            raise InputError("chunk must be one-dimensional")
        if arr.size == 0:
            return
        if int(arr.min()) < 0 or int(arr.max()) >= self.h:
            raise InputError("sequence contains an index outside the alphabet")
        if self._pending_break:
            if self._n > 0:
                self._breaks += 1
            self._pending_break = False
            self._prev = -1
        for start in range(0, arr.size, CHUNK_CAP):
            part = arr[start : start + CHUNK_CAP]
            gt, self._prev = pair_chunk(part, self._cnt, self._adj, self._prev)
            for y in range(self.h):
                row = self._gt[y]
                src = gt[y]
                for x in range(self.h):
                    row[x] += int(src[x])
            self._n += int(part.size)

    def mark_break(self) -> None:
        # consecutive or leading/trailing breaks collapse; only breaks that
        # end up separating two non-empty runs are counted
        self._pending_break = True

    def finish(self) -> PairTables:
        if self._n == 0:
            raise InputError("no symbols were fed")
        adjacent = tuple(tuple(int(v) for v in row) for row in self._adj)
        global_pairs = tuple(
            tuple(self._gt[y][x] for y in range(self.h)) for x in range(self.h)
        )
        counts = tuple(int(c) for c in self._cnt)
        return PairTables(
            adjacent=adjacent,
            global_pairs=global_pairs,
            counts=counts,
            n=self._n,
            segment_breaks=self._breaks,
        )


def _rank_lut(seq: SymbolSequence, ordering: Ordering) -> np.ndarray:
    if ordering.size != seq.alphabet.size:
        raise InputError("ordering size does not match alphabet")
    return np.asarray(ordering.ranks, dtype=np.int64)


def count_descents(seq: SymbolSequence, ordering: Ordering) -> int:
    """Number of positions i with rank(seq[i]) > rank(seq[i+1]); one pass."""
    lut = _rank_lut(seq, ordering)
    total = 0
    prev = -1
    for chunk in seq.chunks():
        got, prev = des_chunk(lut[chunk], prev)
        total += got
    return total


def count_inversions(seq: SymbolSequence, ordering: Ordering) -> int:
    """Number of pairs i < j with rank(seq[i]) > rank(seq[j]); one pass.

    Maintains running per-rank prefix counts, so time is O(n*h) and the
    result is exact at any length.
    """
    lut = _rank_lut(seq, ordering)
    cnt = np.zeros(seq.alphabet.size, dtype=np.int64)
    total = 0
    for chunk in seq.chunks():
        total += inv_chunk(lut[chunk], cnt)
    return total


def build_pair_tables(
    seq: SymbolSequence, segment_breaks: Sequence[int] = ()
) -> PairTables:
    """Pair tables of seq in one pass; breaks split adjacent counting only.

    segment_breaks holds sorted positions p in [0, n] meaning a gap between
    positions p-1 and p.
    """
    breaks = [int(b) for b in segment_breaks]
    if breaks != sorted(breaks):
        raise InputError("segment breaks must be sorted")
    if breaks and breaks[0] < 0:
        raise InputError("segment breaks must be within [0, n]")
    builder = PairTableBuilder(seq.alphabet.size)
    pos = 0
    k = 0
    for chunk in seq.chunks():
        end = pos + chunk.size
        while k < len(breaks) and breaks[k] <= end:
            cut = breaks[k] - pos
            builder.feed(chunk[: cut if cut > 0 else 0])
            builder.mark_break()
            chunk = chunk[max(cut, 0) :]
            pos += max(cut, 0)
            k += 1
        builder.feed(chunk)
        pos = end
    if k < len(breaks):
        raise InputError("segment breaks must be within [0, n]")
    return builder.finish()


def stats_from_pair_tables(tables: PairTables, ordering: Ordering) -> Tuple[int, int]:
    """(descents, inversions) under ordering, from pair tables alone."""
    tables.validate()
    if ordering.size != tables.size:
        raise InputError("ordering size does not match tables")
    des = 0
    inv = 0
    h = tables.size
    for x in range(h):
        rx = ordering.rank_of(x)
        for y in range(h):
            if rx > ordering.rank_of(y):
                des += tables.adjacent[x][y]
                inv += tables.global_pairs[x][y]
    return des, inv
