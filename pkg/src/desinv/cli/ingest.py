"""Streaming sequence ingestion for plain text and FASTA files.

Files are parsed in fixed-size binary blocks with vectorized symbol lookup,
so memory stays O(h^2 + block) regardless of sequence length.  Whitespace is
dropped silently; characters outside the alphabet follow the unknown policy
(skip inserts a segment break, error reports the byte offset); FASTA header
lines separate records with a segment break.  Matching is case-insensitive
when that leaves the symbol map unambiguous.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, List, Optional, Tuple, Union

import numpy as np

from ..core_stats import Alphabet, SymbolSequence
from ..errors import InputError

BLOCK_SIZE = 1 << 20
_WHITESPACE = b" \t\r\n\v\f"

# events: ("data", index array), ("break", effective position),
# ("skipped", dropped-symbol count)
Event = Tuple[str, Union[np.ndarray, int]]


def symbol_lut(alphabet: Alphabet) -> np.ndarray:
    """Byte-to-index table: -1 unknown, -2 whitespace, else alphabet index."""
    if any(len(s) != 1 for s in alphabet.symbols):
        raise InputError("file ingestion requires single-character symbols")
    lut = np.full(256, -1, dtype=np.int64)
    for b in _WHITESPACE:
        lut[b] = -2
    for i, sym in enumerate(alphabet.symbols):
        for variant in {sym, sym.upper(), sym.lower()}:
            code = ord(variant)
            if code > 255:
                raise InputError("file ingestion requires byte-range symbols")
            if lut[code] >= 0 and lut[code] != i:
                # case folding would collide two distinct symbols; keep exact
                continue
            if variant == sym or lut[code] == -1:
                lut[code] = i
    return lut


@dataclass
class _ParserState:
    in_header: bool = False
    at_line_start: bool = True
    emitted: int = 0  # effective symbols emitted so far
    last_break: int = -1
    file_pos: int = 0


def _parse_block(
    block: bytes,
    fmt: str,
    lut: np.ndarray,
    unknown_policy: str,
    state: _ParserState,
) -> List[Event]:
    raw = np.frombuffer(block, dtype=np.uint8)
    vals = lut[raw]
    header_break_idx: List[int] = []

    if fmt == "fasta":
        is_nl = raw == 0x0A
        line_start = np.zeros(raw.size, dtype=bool)
        line_start[0] = state.at_line_start
        if raw.size > 1:
            line_start[1:] = is_nl[:-1]
        header_starts = np.flatnonzero((raw == ord(">")) & line_start)
        nl_idx = np.flatnonzero(is_nl)
        # mask header bytes (from '>' through the newline) as whitespace
        if state.in_header:
            stop = int(nl_idx[0]) if nl_idx.size else raw.size
            vals[:stop] = -2
            state.in_header = stop == raw.size
        for hs in header_starts:
            if vals[hs] == -2:
                continue  # '>' inside an already-masked header region
            k = int(np.searchsorted(nl_idx, hs))
            nxt = int(nl_idx[k]) if k < nl_idx.size else raw.size
            vals[hs:nxt] = -2
            header_break_idx.append(int(hs))
            if nxt == raw.size:
                state.in_header = True
        state.at_line_start = bool(is_nl[-1]) if raw.size else state.at_line_start

    unknown = vals == -1
    n_unknown = int(unknown.sum())
    if n_unknown and unknown_policy == "error":
        idx = int(np.argmax(unknown))
        ch = chr(int(raw[idx]))
        raise InputError(
            f"unknown symbol {ch!r} at byte offset {state.file_pos + idx}"
        )

    keep = vals >= 0
    keep_cum = np.cumsum(keep)
    kept_vals = vals[keep]

    break_local = [int(keep_cum[i]) for i in np.flatnonzero(unknown)]
    break_local.extend(int(keep_cum[i]) for i in header_break_idx)
    break_local = sorted(set(break_local))

    events: List[Event] = []
    if n_unknown:
        events.append(("skipped", n_unknown))
    prev = 0
    for off in break_local:
        if off > prev:
            events.append(("data", kept_vals[prev:off]))
        events.append(("break", state.emitted + off))
        prev = off
    if kept_vals.size > prev:
        events.append(("data", kept_vals[prev:]))

    state.emitted += int(kept_vals.size)
    state.file_pos += raw.size
    return events


def parse_events(
    path: str, fmt: str, lut: np.ndarray, unknown_policy: str
) -> Iterator[Event]:
    """Stream ("data", chunk)/("break", position) events from a file."""
    if fmt not in ("plain", "fasta"):
        raise InputError(f"unknown format {fmt!r}")
    if unknown_policy not in ("skip", "error"):
        raise InputError(f"unknown policy {unknown_policy!r}")
    state = _ParserState()
    try:
        handle = open(path, "rb")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    with handle:
        while True:
            block = handle.read(BLOCK_SIZE)
            if not block:
                return
            for event in _parse_block(block, fmt, lut, unknown_policy, state):
                if event[0] == "break":
                    # collapse repeats at the same effective position
                    if event[1] == state.last_break:
                        continue
                    state.last_break = event[1]
                yield event


def ingest(
    path: str,
    fmt: str,
    alphabet: Alphabet,
    unknown_policy: str = "skip",
) -> Tuple[SymbolSequence, List[int]]:
    """Parse a file into a re-streamable SymbolSequence plus break positions.

    The returned sequence re-reads the file on each pass, so memory stays
    bounded; segment break positions are in effective-sequence coordinates.
    """
    lut = symbol_lut(alphabet)
    breaks: List[int] = []
    total = 0
    for kind, payload in parse_events(path, fmt, lut, unknown_policy):
        if kind == "break":
            breaks.append(int(payload))
        elif kind == "data":
            total += int(payload.size)
    if total == 0:
        raise InputError("no alphabet symbols found in input")

    def factory():
        for kind, payload in parse_events(path, fmt, lut, unknown_policy):
            if kind == "data":
                yield payload

    seq = SymbolSequence(alphabet, chunk_factory=factory)
    return seq, breaks
