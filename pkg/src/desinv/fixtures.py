"""Bundled data fixtures."""

from __future__ import annotations

import json
from importlib import resources
from typing import Tuple

from .core_stats import Alphabet, PairTables


def chromosome19_tables() -> Tuple[Alphabet, PairTables]:
    """Pair tables of the human chromosome 19 base sequence.

    Returns the (A, C, G, T) alphabet and validated PairTables, so the
    published analysis reproduces without any genome download.
    """
    ref = resources.files("desinv").joinpath("data/chr19_pair_tables.json")
    with ref.open("r", encoding="utf-8") as fh:
        obj = json.load(fh)
    alphabet = Alphabet(obj["alphabet"])
    tables = PairTables(
        adjacent=tuple(tuple(int(v) for v in row) for row in obj["adjacent"]),
        global_pairs=tuple(tuple(int(v) for v in row) for row in obj["global_pairs"]),
        counts=tuple(int(c) for c in obj["counts"]),
        n=int(obj["n"]),
        segment_breaks=int(obj["segment_breaks"]),
    )
    tables.validate()
    return alphabet, tables
