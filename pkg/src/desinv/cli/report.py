"""Report assembly: ordering sweeps, canonical JSON, CSV rendering.

All rationals are rendered as decimal strings at fixed significance and JSON
keys are sorted, so identical inputs produce byte-identical reports.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from ..core_stats import Alphabet, Multiset, Ordering, PairTables, stats_from_pair_tables
from ..errors import InputError
from ..moments import MomentSummary, descent_moments, inversion_moments, zscore

SIG_DIGITS = 20
ORDERING_SWEEP_GUARD = 5040  # h! cap for --orderings all
P_UNDERFLOW = 1e-300


def decimal_string(value: Fraction, sig: int = SIG_DIGITS) -> str:
    """Decimal rendering of an exact rational to sig significant digits."""
    with localcontext() as ctx:
        ctx.prec = sig
        d = Decimal(value.numerator) / Decimal(value.denominator)
    return str(d)


def sqrt_decimal_string(value: Fraction, sig: int = SIG_DIGITS) -> str:
    """Decimal rendering of sqrt(value) to sig significant digits."""
    if value < 0:
        raise InputError("cannot take the square root of a negative rational")
    with localcontext() as ctx:
        ctx.prec = sig + 10
        d = (Decimal(value.numerator) / Decimal(value.denominator)).sqrt()
        ctx.prec = sig
        d = +d
    return str(d)


def two_sided_p(z: float) -> Union[float, str]:
    """Two-sided normal p-value 2(1 - Phi(|z|)), "<1e-300" on underflow."""
    p = math.erfc(abs(z) / math.sqrt(2.0))
    p = min(1.0, max(0.0, p))
    if p < P_UNDERFLOW:
        return "<1e-300"
    return p


@dataclass(frozen=True)
class OrderingRow:
    ordering: str
    descents: int
    inversions: int
    z_descents: Optional[float]
    z_inversions: Optional[float]
    p_descents: Optional[Union[float, str]]
    p_inversions: Optional[Union[float, str]]


@dataclass(frozen=True)
class AnalysisReport:
    """Full analysis of one sequence: counts, moments, per-ordering rows."""

    alphabet: Tuple[str, ...]
    counts: Tuple[int, ...]
    n: int
    degenerate: bool
    des_moments: MomentSummary
    inv_moments: MomentSummary
    rows: Tuple[OrderingRow, ...]
    metadata: Dict[str, object] = field(default_factory=dict)

    def to_json_obj(self) -> Dict[str, object]:
        return {
            "alphabet": list(self.alphabet),
            "counts": list(self.counts),
            "n": self.n,
            "degenerate": self.degenerate,
            "moments": {
                "mu_descents": decimal_string(self.des_moments.mu),
                "sigma_descents": sqrt_decimal_string(self.des_moments.sigma2),
                "mu_inversions": decimal_string(self.inv_moments.mu),
                "sigma_inversions": sqrt_decimal_string(self.inv_moments.sigma2),
                "mu_descents_exact": str(self.des_moments.mu),
                "sigma2_descents_exact": str(self.des_moments.sigma2),
                "mu_inversions_exact": str(self.inv_moments.mu),
                "sigma2_inversions_exact": str(self.inv_moments.sigma2),
            },
            "rows": [
                {
                    "ordering": r.ordering,
                    "descents": r.descents,
                    "inversions": r.inversions,
                    "z_descents": r.z_descents,
                    "z_inversions": r.z_inversions,
                    "p_descents": r.p_descents,
                    "p_inversions": r.p_inversions,
                }
                for r in self.rows
            ],
            "metadata": self.metadata,
        }


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def resolve_orderings(
    alphabet: Alphabet, requested: Union[str, Sequence[str]]
) -> List[Ordering]:
    """Ordering list from "all" or explicit labels (semicolon separated)."""
    if isinstance(requested, str):
        if requested.strip() == "all":
            total = math.factorial(alphabet.size)
            if total > ORDERING_SWEEP_GUARD:
                raise InputError(
                    f"{total} orderings exceed the sweep guard "
                    f"({ORDERING_SWEEP_GUARD}); pass an explicit list"
                )
            return [
                Ordering.from_symbol_order(alphabet, perm)
                for perm in itertools.permutations(alphabet.symbols)
            ]
        labels = [part for part in requested.split(";") if part.strip()]
    else:
        labels = list(requested)
    if not labels:
        raise InputError("no orderings requested")
    return [Ordering.from_symbol_order(alphabet, label) for label in labels]


def build_report(
    tables: PairTables,
    alphabet: Alphabet,
    orderings: Union[str, Sequence[str]] = "all",
    metadata: Optional[Dict[str, object]] = None,
) -> AnalysisReport:
    """Per-ordering statistics and exact moments from pair tables.

    The tables are built once; each ordering costs O(h^2).  The moment
    summaries do not depend on the ordering, which the report reflects by
    carrying a single summary pair.
    """
    if alphabet.size != tables.size:
        raise InputError("alphabet size does not match tables")
    ords = resolve_orderings(alphabet, orderings)
    multiset = Multiset(tables.counts)
    des_m = descent_moments(multiset)
    inv_m = inversion_moments(multiset)
    degenerate = des_m.sigma2 == 0 or inv_m.sigma2 == 0
    rows = []
    for ordering in ords:
        des, inv = stats_from_pair_tables(tables, ordering)
        if degenerate:
            z_d = z_i = p_d = p_i = None
        else:
            z_d = zscore(des, des_m)
            z_i = zscore(inv, inv_m)
            p_d = two_sided_p(z_d)
            p_i = two_sided_p(z_i)
        rows.append(
            OrderingRow(
                ordering=ordering.label(alphabet),
                descents=des,
                inversions=inv,
                z_descents=z_d,
                z_inversions=z_i,
                p_descents=p_d,
                p_inversions=p_i,
            )
        )
    return AnalysisReport(
        alphabet=alphabet.symbols,
        counts=tables.counts,
        n=tables.n,
        degenerate=degenerate,
        des_moments=des_m,
        inv_moments=inv_m,
        rows=tuple(rows),
        metadata=dict(metadata or {}),
    )


def ordering_table_csv(report: AnalysisReport) -> str:
    """Delimited ordering table, one row per ordering."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(
        [
            "ordering",
            "descents",
            "inversions",
            "z_descents",
            "z_inversions",
            "p_descents",
            "p_inversions",
        ]
    )
    for r in report.rows:
        writer.writerow(
            [
                r.ordering,
                r.descents,
                r.inversions,
                "" if r.z_descents is None else repr(r.z_descents),
                "" if r.z_inversions is None else repr(r.z_inversions),
                "" if r.p_descents is None else (
                    r.p_descents if isinstance(r.p_descents, str) else repr(r.p_descents)
                ),
                "" if r.p_inversions is None else (
                    r.p_inversions
                    if isinstance(r.p_inversions, str)
                    else repr(r.p_inversions)
                ),
            ]
        )
    return out.getvalue()


def histogram_csv(
    edges: Sequence[float], counts: Sequence[int]
) -> str:
    """Delimited histogram: one row per bin with [lower, upper) bounds."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["lower", "upper", "count"])
    for k in range(len(counts)):
        writer.writerow([repr(float(edges[k])), repr(float(edges[k + 1])), int(counts[k])])
    return out.getvalue()
