"""Command-line entry point and the operation drivers behind it.

Subcommands: analyze (file report with ordering sweep, delimited table, and
figures), simulate (Monte Carlo normality measurement), couple (size-bias
coupling diagnostics), moments (exact moment printout), oracle (exact
distribution dump).  Every driver returns the report object it writes, so
tests can call them directly.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..core_stats import Alphabet, Multiset, PairTableBuilder, PairTables
from ..coupling import (
    RandomSource,
    estimate_varE,
    ks_distance,
    sample_descent_coupling,
    sample_inversion_coupling,
)
from ..errors import DegenerateError, InputError, PreconditionError, StatError
from ..moments import (
    descent_moments,
    inversion_moments,
    stein_kolmogorov_bound,
    stein_smooth_bound,
)
from ..oracle import exact_distribution
from .ingest import parse_events, symbol_lut
from .report import (
    AnalysisReport,
    build_report,
    canonical_json,
    decimal_string,
    histogram_csv,
    ordering_table_csv,
    sqrt_decimal_string,
)

_STATISTICS = ("inversions", "descents")

# sampled arrangements are processed in batches of roughly this many cells
_BATCH_CELLS = 8_000_000
# exact varE replicates inside `couple` are capped; the estimate's cost is
# one exhaustive shift enumeration per replicate
_VARE_CAP = 200


def _parse_alphabet(text: str) -> Alphabet:
    if "," in text:
        return Alphabet(tok.strip() for tok in text.split(","))
    return Alphabet.from_string(text)


def _write_output(output: Optional[str], files: Dict[str, str], stdout_key: str) -> None:
    if output is None:
        sys.stdout.write(files[stdout_key])
        return
    os.makedirs(output, exist_ok=True)
    for name, content in files.items():
        with open(os.path.join(output, name), "w", encoding="utf-8") as fh:
            fh.write(content)


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------


def analyze_file(
    path: str,
    fmt: str = "plain",
    alphabet: Optional[Alphabet] = None,
    orderings="all",
    unknown_policy: str = "skip",
) -> AnalysisReport:
    """Ingest a file and produce the full analysis report in one pass."""
    alphabet = alphabet or Alphabet.from_string("ACGT")
    lut = symbol_lut(alphabet)
    builder = PairTableBuilder(alphabet.size)
    skipped = 0
    for kind, payload in parse_events(path, fmt, lut, unknown_policy):
        if kind == "data":
            builder.feed(payload)
        elif kind == "break":
            builder.mark_break()
        elif kind == "skipped":
            skipped += int(payload)
    tables = builder.finish()
    metadata = {
        "file": str(path),
        "format": fmt,
        "unknown_policy": unknown_policy,
        "skipped_symbols": skipped,
        "segment_breaks": tables.segment_breaks,
    }
    return build_report(tables, alphabet, orderings, metadata)


def analyze_tables(
    tables: PairTables,
    alphabet: Alphabet,
    orderings="all",
    metadata: Optional[Dict[str, object]] = None,
) -> AnalysisReport:
    """Analysis report from pre-built pair tables (no file input)."""
    return build_report(tables, alphabet, orderings, metadata)


def _run_analyze(args) -> int:
    report = analyze_file(
        args.path,
        fmt=args.format,
        alphabet=_parse_alphabet(args.alphabet),
        orderings=args.orderings,
        unknown_policy=args.unknown_policy,
    )
    files = {
        "report.json": canonical_json(report.to_json_obj()),
        "ordering_table.csv": ordering_table_csv(report),
    }
    _write_output(args.output, files, "report.json")
    if args.output is not None and not report.degenerate:
        from .figures import save_zscore_chart

        save_zscore_chart(report, os.path.join(args.output, "zscores.png"))
    return 0


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------


def sample_statistic_values(
    multiset: Multiset,
    statistics: Sequence[str],
    samples: int,
    rng,
) -> Dict[str, np.ndarray]:
    """Statistic values of `samples` uniform arrangements, batched.

    All requested statistics are evaluated on the same sampled arrangements,
    so two statistics cost one stream of permutations.
    """
    for statistic in statistics:
        if statistic not in _STATISTICS:
            raise InputError(f"unknown statistic {statistic!r}")
    if samples < 1:
        raise InputError("samples must be positive")
    gen = rng.generator if isinstance(rng, RandomSource) else rng
    n = multiset.n
    h = multiset.size
    dtype = np.int8 if h <= 127 else np.int64
    base = np.repeat(np.arange(h, dtype=dtype), np.asarray(multiset.counts))
    batch = int(max(1, min(samples, _BATCH_CELLS // max(1, n))))
    tile = np.tile(base, (batch, 1))
    out = {s: np.empty(samples, dtype=np.int64) for s in statistics}
    done = 0
    while done < samples:
        b = min(batch, samples - done)
        rows = gen.permuted(tile[:b], axis=1)
        if "descents" in out:
            out["descents"][done : done + b] = np.count_nonzero(
                rows[:, :-1] > rows[:, 1:], axis=1
            )
        if "inversions" in out:
            inv = np.zeros(b, dtype=np.int64)
            for x in range(1, h):
                if multiset.counts[x] == 0:
                    continue
                cum = np.cumsum(rows == x, axis=1, dtype=np.int32)
                for y in range(x):
                    if multiset.counts[y] == 0:
                        continue
                    inv += (cum * (rows == y)).sum(axis=1, dtype=np.int64)
            out["inversions"][done : done + b] = inv
        done += b
    return out


def _histogram(values: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    lo = int(values.min())
    hi = int(values.max())
    if hi - lo + 1 <= 512:
        edges = np.arange(lo, hi + 2, dtype=np.float64) - 0.5
        counts = np.bincount(values - lo, minlength=hi - lo + 1)
    else:
        counts, edges = np.histogram(values, bins=64)
    return edges, counts


def simulate(
    multiset: Multiset,
    statistic: str,
    samples: int,
    seed: int,
) -> Dict[str, object]:
    """Monte Carlo normality report for one statistic of one multiset."""
    if statistic == "descents":
        summary = descent_moments(multiset)
    elif statistic == "inversions":
        summary = inversion_moments(multiset)
    else:
        raise InputError(f"unknown statistic {statistic!r}")
    if summary.sigma2 == 0:
        raise DegenerateError("statistic is almost surely constant; nothing to simulate")
    rng = RandomSource(seed)
    values = sample_statistic_values(multiset, (statistic,), samples, rng)[statistic]
    edges, counts = _histogram(values)
    return {
        "statistic": statistic,
        "counts": list(multiset.counts),
        "n": multiset.n,
        "samples": int(samples),
        "seed": int(seed),
        "mu_exact": decimal_string(summary.mu),
        "sigma_exact": sqrt_decimal_string(summary.sigma2),
        "sample_mean": float(values.mean()),
        "sample_variance": float(values.var(ddof=1)),
        "ks_distance": ks_distance(values, summary.mu_f, summary.sigma_f),
        "histogram": {
            "edges": [float(e) for e in edges],
            "counts": [int(c) for c in counts],
        },
    }


def _run_simulate(args) -> int:
    multiset = Multiset(args.counts)
    result = simulate(multiset, args.statistic, args.samples, args.seed)
    files = {
        "simulate.json": canonical_json(result),
        "histogram.csv": histogram_csv(
            result["histogram"]["edges"], result["histogram"]["counts"]
        ),
    }
    _write_output(args.output, files, "simulate.json")
    if args.output is not None:
        from .figures import save_histogram_chart

        if args.statistic == "descents":
            summary = descent_moments(multiset)
        else:
            summary = inversion_moments(multiset)
        save_histogram_chart(
            result["histogram"]["edges"],
            result["histogram"]["counts"],
            summary.mu_f,
            summary.sigma_f,
            os.path.join(args.output, "histogram.png"),
            f"{args.statistic}, n = {multiset.n}",
        )
    return 0


# ---------------------------------------------------------------------------
# couple
# ---------------------------------------------------------------------------


def couple(
    multiset: Multiset,
    statistic: str,
    samples: int,
    seed: int,
) -> Dict[str, object]:
    """Size-bias coupling diagnostics: shift bound check, varE, Stein bounds.

    Uses `samples` coupled draws for the shift second moment and the observed
    maximum, and up to 200 exact conditional-shift replicates for varE.
    """
    if statistic == "descents":
        summary = descent_moments(multiset)
        sampler = sample_descent_coupling
        bound = 8
    elif statistic == "inversions":
        summary = inversion_moments(multiset)
        sampler = sample_inversion_coupling
        bound = 4 * multiset.n
    else:
        raise InputError(f"unknown statistic {statistic!r}")
    if samples < 1:
        raise InputError("samples must be positive")
    rng = RandomSource(seed)
    sq_sum = 0.0
    max_abs = 0
    for _ in range(samples):
        outcome = sampler(multiset, rng)
        sq_sum += float(outcome.shift) ** 2
        max_abs = max(max_abs, abs(outcome.shift))
    e_delta_sq = sq_sum / samples
    vare_reps = min(samples, _VARE_CAP)
    if vare_reps < 3:
        vare_reps = 3
    vare, vare_se = estimate_varE(
        multiset, statistic, vare_reps, RandomSource(seed, stream=1)
    )
    vare = max(0.0, vare)
    mu = summary.mu_f
    sigma = summary.sigma_f
    smooth = stein_smooth_bound(mu, sigma, vare, e_delta_sq, 1.0, 1.0)
    try:
        kolmogorov: Dict[str, object] = {
            "applicable": True,
            "value": stein_kolmogorov_bound(mu, sigma, float(bound), vare),
        }
    except PreconditionError as exc:
        kolmogorov = {"applicable": False, "reason": str(exc)}
    return {
        "statistic": statistic,
        "counts": list(multiset.counts),
        "n": multiset.n,
        "samples": int(samples),
        "seed": int(seed),
        "mu_exact": decimal_string(summary.mu),
        "sigma_exact": sqrt_decimal_string(summary.sigma2),
        "max_abs_shift": int(max_abs),
        "shift_bound": int(bound),
        "e_delta_sq": e_delta_sq,
        "varE": {
            "estimate": vare,
            "std_error": vare_se,
            "replicates": int(vare_reps),
        },
        "smooth_bound_unit_norms": smooth,
        "kolmogorov_bound": kolmogorov,
    }


def _run_couple(args) -> int:
    result = couple(Multiset(args.counts), args.statistic, args.samples, args.seed)
    _write_output(args.output, {"couple.json": canonical_json(result)}, "couple.json")
    return 0


# ---------------------------------------------------------------------------
# moments, oracle
# ---------------------------------------------------------------------------


def moments_report(counts: Iterable[int]) -> Dict[str, object]:
    multiset = Multiset(counts)
    des = descent_moments(multiset)
    inv = inversion_moments(multiset)
    return {
        "counts": list(multiset.counts),
        "n": multiset.n,
        "moments": {
            "mu_descents": decimal_string(des.mu),
            "sigma_descents": sqrt_decimal_string(des.sigma2),
            "mu_inversions": decimal_string(inv.mu),
            "sigma_inversions": sqrt_decimal_string(inv.sigma2),
            "mu_descents_exact": str(des.mu),
            "sigma2_descents_exact": str(des.sigma2),
            "mu_inversions_exact": str(inv.mu),
            "sigma2_inversions_exact": str(inv.sigma2),
        },
    }


def _run_moments(args) -> int:
    result = moments_report(args.counts)
    m = result["moments"]
    lines = [
        f"n = {result['n']}",
        f"descents:   mu = {m['mu_descents']}  sigma = {m['sigma_descents']}",
        f"inversions: mu = {m['mu_inversions']}  sigma = {m['sigma_inversions']}",
    ]
    print("\n".join(lines))
    if args.output is not None:
        _write_output(args.output, {"moments.json": canonical_json(result)}, "moments.json")
    return 0


def oracle_report(statistic: str, counts: Iterable[int]) -> Dict[str, object]:
    multiset = Multiset(counts)
    dist = exact_distribution(multiset, statistic)
    return {
        "statistic": statistic,
        "counts": list(multiset.counts),
        "n": multiset.n,
        "mean": str(dist.mean()),
        "variance": str(dist.variance()),
        "support": {str(w): str(p) for w, p in sorted(dist.support.items())},
    }


def _run_oracle(args) -> int:
    result = oracle_report(args.statistic, args.counts)
    _write_output(
        args.output, {"distribution.json": canonical_json(result)}, "distribution.json"
    )
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="desinv",
        description=(
            "Descent and inversion statistics of symbol sequences, with exact "
            "moments and normal-approximation diagnostics."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="analyze a sequence file over orderings")
    p.add_argument("path", help="input file")
    p.add_argument("--format", choices=("plain", "fasta"), default="plain")
    p.add_argument("--alphabet", default="ACGT")
    p.add_argument("--orderings", default="all", help='"all" or labels like "A,C,G,T;T,G,C,A"')
    p.add_argument("--unknown-policy", choices=("skip", "error"), default="skip")
    p.add_argument("--output", default=None, help="directory for report files")
    p.set_defaults(func=_run_analyze)

    p = sub.add_parser("simulate", help="Monte Carlo normality measurement")
    p.add_argument("statistic", choices=_STATISTICS)
    p.add_argument("counts", nargs="+", type=int)
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", default=None)
    p.set_defaults(func=_run_simulate)

    p = sub.add_parser("couple", help="size-bias coupling diagnostics")
    p.add_argument("statistic", choices=_STATISTICS)
    p.add_argument("counts", nargs="+", type=int)
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", default=None)
    p.set_defaults(func=_run_couple)

    p = sub.add_parser("moments", help="print exact moments for a count vector")
    p.add_argument("counts", nargs="+", type=int)
    p.add_argument("--output", default=None)
    p.set_defaults(func=_run_moments)

    p = sub.add_parser("oracle", help="dump the exact statistic distribution")
    p.add_argument("statistic", choices=_STATISTICS)
    p.add_argument("counts", nargs="+", type=int)
    p.add_argument("--output", default=None)
    p.set_defaults(func=_run_oracle)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except StatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
