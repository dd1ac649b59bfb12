"""Acceptance gate: ten end-to-end criteria, one verdict line each.

Each criterion is one test, so `pytest tests/test_acceptance.py -v` lists one
row per criterion; add `-s` to see the printed CRITERION nn: PASS/FAIL lines
with their measurements.
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest

from desinv import (
    Alphabet,
    Multiset,
    Ordering,
    RandomSource,
    SymbolSequence,
    beta_bound_check,
    build_pair_tables,
    chromosome19_tables,
    classical_inversion_distribution,
    conditional_mean_shift,
    count_inversions,
    descent_moments,
    exact_coupling_distribution,
    exact_size_biased_distribution,
    inversion_moments,
    ks_distance,
    sample_descent_coupling,
    sample_inversion_coupling,
)
from desinv.cli.main import analyze_tables, main, sample_statistic_values
from desinv.errors import DegenerateError

from conftest import (
    brute_arrangements,
    brute_law,
    compositions,
    law_moments,
    partitions,
    sequence_of,
)

CHR19_COUNTS = (14383026, 13473774, 13506612, 14422243)

# 11-significant-digit reference moments for the chromosome 19 count vector
REFERENCE_MOMENTS = {
    "mu_descents": 2.0912146861e7,
    "sigma_descents": 2.0871959423e3,
    "mu_inversions": 5.8329890505e14,
    "sigma_inversions": 6.7231321079e10,
}

# reference z-score table for the chromosome 19 sequence, all 24 orderings:
# ordering label -> (z_descents, z_inversions), rounded to two decimals
REFERENCE_Z = {
    "A,C,G,T": (36.13, -11.64),
    "C,A,G,T": (-628.47, -92.58),
    "G,A,C,T": (-631.23, -93.03),
    "A,G,C,T": (-981.20, -11.86),
    "C,G,A,T": (-278.50, -173.74),
    "G,C,A,T": (-1295.83, -173.96),
    "T,C,A,G": (-628.47, 93.03),
    "C,T,A,G": (-981.20, 4.29),
    "A,T,C,G": (-278.50, 166.08),
    "T,A,C,G": (36.13, 173.96),
    "C,A,T,G": (-1295.83, -3.60),
    "A,C,T,G": (-631.23, 77.34),
    "A,G,T,C": (-628.47, 76.87),
    "G,A,T,C": (-278.50, -4.29),
    "T,A,G,C": (-981.20, 173.74),
    "A,T,G,C": (-1295.83, 165.85),
    "G,T,A,C": (36.13, 3.60),
    "T,G,A,C": (-631.23, 92.58),
    "T,G,C,A": (-1295.83, 11.64),
    "G,T,C,A": (-628.47, -77.34),
    "C,T,G,A": (-631.23, -76.87),
    "T,C,G,A": (-278.50, 11.86),
    "G,C,T,A": (-981.20, -166.08),
    "C,G,T,A": (36.13, -165.85),
}


def _verdict(num: int, ok: bool, detail: str = "") -> None:
    tag = "PASS" if ok else "FAIL"
    suffix = f"  [{detail}]" if detail else ""
    print(f"CRITERION {num:02d}: {tag}{suffix}")
    assert ok, f"criterion {num:02d} failed: {detail}"


def test_criterion_01_reference_moments_under_one_second(capsys):
    start = time.perf_counter()
    rc = main(["moments", *(str(c) for c in CHR19_COUNTS)])
    elapsed = time.perf_counter() - start
    out = capsys.readouterr().out
    lines = out.splitlines()
    des = lines[1].split()
    inv = lines[2].split()
    got = {
        "mu_descents": float(des[3]),
        "sigma_descents": float(des[6]),
        "mu_inversions": float(inv[3]),
        "sigma_inversions": float(inv[6]),
    }
    rel = {
        key: abs(got[key] / ref - 1.0) for key, ref in REFERENCE_MOMENTS.items()
    }
    worst = max(rel.values())
    _verdict(
        1,
        rc == 0 and worst <= 5e-11 and elapsed < 1.0,
        f"max rel err {worst:.2e}, {elapsed:.3f}s",
    )


def test_criterion_02_reference_z_table_under_one_second():
    alphabet, tables = chromosome19_tables()
    start = time.perf_counter()
    report = analyze_tables(tables, alphabet, "all")
    elapsed = time.perf_counter() - start
    rows = {r.ordering: r for r in report.rows}
    worst = 0.0
    for label, (z_des, z_inv) in REFERENCE_Z.items():
        row = rows[label]
        worst = max(worst, abs(row.z_descents - z_des), abs(row.z_inversions - z_inv))
    _verdict(
        2,
        len(rows) == 24 and worst <= 0.01 and elapsed < 1.0,
        f"24 orderings, max |dz| {worst:.4f}, {elapsed:.3f}s",
    )


def test_criterion_03_moment_formulas_match_enumeration():
    start = time.perf_counter()
    cases = 0
    failures = []
    for counts in compositions(8, 4):
        m = Multiset(counts)
        for statistic, func in (
            ("descents", descent_moments),
            ("inversions", inversion_moments),
        ):
            mean, variance = law_moments(brute_law(counts, statistic))
            summary = func(m)
            if summary.mu != mean or summary.sigma2 != variance:
                failures.append((counts, statistic))
            cases += 1
    elapsed = time.perf_counter() - start
    _verdict(
        3,
        not failures and elapsed < 60.0,
        f"{cases} cases exact, {elapsed:.2f}s" + (f", failures {failures[:3]}" if failures else ""),
    )


def test_criterion_04_coupling_law_equals_size_biased_law(warm_kernels):
    start = time.perf_counter()
    cases = 0
    failures = []
    for n in range(2, 7):
        for counts in partitions(n, 3):
            m = Multiset(counts)
            for statistic in ("descents", "inversions"):
                if len(counts) == 1:
                    with pytest.raises(DegenerateError):
                        exact_coupling_distribution(m, statistic)
                    continue
                got = exact_coupling_distribution(m, statistic).support
                want = exact_size_biased_distribution(m, statistic).support
                if got != want:
                    failures.append((counts, statistic))
                cases += 1
    elapsed = time.perf_counter() - start
    _verdict(
        4,
        not failures and elapsed < 120.0,
        f"{cases} laws exact, {elapsed:.2f}s",
    )


def test_criterion_05_shift_bounds_never_violated(warm_kernels):
    rng = RandomSource(13)
    draws = 0
    violations = 0
    for counts in ((3, 2), (2, 2, 2), (5, 1), (4, 4), (2, 3, 4), (1, 1, 1, 1)):
        m = Multiset(counts)
        n = m.n
        for _ in range(10_000):
            if abs(sample_inversion_coupling(m, rng).shift) > 4 * n:
                violations += 1
            if abs(sample_descent_coupling(m, rng).shift) > 8:
                violations += 1
            draws += 2
    _verdict(
        5,
        draws >= 100_000 and violations == 0,
        f"{draws} draws, {violations} violations",
    )


def test_criterion_06_normal_distance_shrinks(warm_kernels):
    thresholds = {50: 0.08, 500: 0.04, 5000: 0.02}
    start = time.perf_counter()
    ks = {"descents": {}, "inversions": {}}
    for k in (50, 500, 5000):
        m = Multiset((k, k))
        gen = RandomSource(30).generator
        vals = sample_statistic_values(m, ("descents", "inversions"), 20_000, gen)
        summaries = {
            "descents": descent_moments(m),
            "inversions": inversion_moments(m),
        }
        for statistic in ("descents", "inversions"):
            s = summaries[statistic]
            ks[statistic][k] = ks_distance(vals[statistic], s.mu_f, s.sigma_f)
    elapsed = time.perf_counter() - start
    below = all(
        ks[statistic][k] < thresholds[k]
        for statistic in ks
        for k in thresholds
    )
    decreasing = all(
        ks[statistic][50] > ks[statistic][500] > ks[statistic][5000]
        for statistic in ks
    )
    detail = ", ".join(
        f"{statistic[:3]} k={k}: {ks[statistic][k]:.4f}"
        for statistic in ("descents", "inversions")
        for k in (50, 500, 5000)
    )
    _verdict(
        6,
        below and decreasing and elapsed < 300.0,
        f"{detail}, {elapsed:.1f}s",
    )


def test_criterion_07_mean_shift_averages_to_variance_over_mean(warm_kernels):
    start = time.perf_counter()
    cases = 0
    failures = []
    for n in range(2, 9):
        for counts in partitions(n, 3):
            if len(counts) == 1:
                continue
            m = Multiset(counts)
            arrangements = brute_arrangements(counts)
            for statistic, func in (
                ("descents", descent_moments),
                ("inversions", inversion_moments),
            ):
                total = Fraction(0)
                for arr in arrangements:
                    total += conditional_mean_shift(
                        np.array(arr, dtype=np.int64), statistic
                    )
                average = total / len(arrangements)
                summary = func(m)
                if average != summary.sigma2 / summary.mu:
                    failures.append((counts, statistic))
                cases += 1
    elapsed = time.perf_counter() - start
    _verdict(
        7,
        not failures,
        f"{cases} identities exact, {elapsed:.2f}s",
    )


def test_criterion_08_classical_inversion_law_exact():
    law_ok = True
    for n in range(1, 9):
        law = classical_inversion_distribution(n)
        if law.support != brute_law((1,) * n, "inversions"):
            law_ok = False
    moments_ok = True
    for n in (1, 2, 3, 4, 5, 6, 7, 8, 25, 60, 100):
        law = classical_inversion_distribution(n)
        if law.mean() != Fraction(math.comb(n, 2), 2):
            moments_ok = False
        if law.variance() != Fraction(n * (n - 1) * (2 * n + 5), 72):
            moments_ok = False
    _verdict(
        8,
        law_ok and moments_ok,
        "laws n<=8 exact, closed-form moments exact to n=100",
    )


def test_criterion_09_count_vector_inequalities_hold():
    start = time.perf_counter()
    gen = np.random.default_rng(31)
    betas = (Fraction(1, 2), Fraction(3, 5), Fraction(4, 5), Fraction(19, 20))
    checked = 0
    failures = 0
    for beta in betas:
        produced = 0
        while produced < 2_500:
            h = int(gen.integers(3, 7)) if beta == Fraction(1, 2) else int(gen.integers(2, 7))
            counts = [int(c) for c in gen.integers(1, 40, size=h)]
            n = sum(counts)
            cap = math.floor(beta * n)
            if h * cap < n:
                continue  # no vector with this shape can satisfy the cap
            while max(counts) > cap:
                counts[counts.index(max(counts))] -= 1
                counts[counts.index(min(counts))] += 1
            if not beta_bound_check(Multiset(counts), beta).satisfied:
                failures += 1
            produced += 1
            checked += 1
    equalities_ok = True
    for counts, beta in (
        ((5, 5), Fraction(1, 2)),
        ((6, 4), Fraction(3, 5)),
        ((8, 2), Fraction(4, 5)),
        ((19, 1), Fraction(19, 20)),
    ):
        # two-point vectors (beta n, (1 - beta) n) reach equality exactly
        report = beta_bound_check(Multiset(counts), beta)
        if report.quadratic_lower != report.quadratic_value:
            equalities_ok = False
        if report.cubic_lower != report.cubic_value:
            equalities_ok = False
    elapsed = time.perf_counter() - start
    _verdict(
        9,
        checked == 10_000 and failures == 0 and equalities_ok,
        f"{checked} vectors, {failures} failures, extremal equalities "
        f"{'exact' if equalities_ok else 'BROKEN'}, {elapsed:.2f}s",
    )


def test_criterion_10_exact_counting_and_throughput(warm_kernels):
    gen = np.random.default_rng(37)
    mismatches = 0
    for _ in range(1_000):
        n = int(gen.integers(2, 2001))
        h = int(gen.integers(2, 7))
        values = gen.integers(0, h, size=n)
        got = count_inversions(sequence_of(values, h=h), Ordering.identity(h))
        brute = int(np.count_nonzero(np.triu(values[:, None] > values[None, :], k=1)))
        if got != brute:
            mismatches += 1

    alphabet = Alphabet.from_string("ACGT")
    chunk = np.asarray(
        np.random.default_rng(101).integers(0, 4, size=4_194_304), dtype=np.int64
    )
    reps = 25
    total = chunk.size * reps
    seq = SymbolSequence(alphabet, chunk_factory=lambda: (chunk for _ in range(reps)))
    build_pair_tables(SymbolSequence(alphabet, data=chunk[:4096]))  # warm path
    start = time.perf_counter()
    tables = build_pair_tables(seq)
    elapsed = time.perf_counter() - start
    throughput = total / elapsed
    _verdict(
        10,
        mismatches == 0
        and tables.n == total
        and total >= 10**8
        and throughput >= 50e6,
        f"1000 sequences exact, {total/1e6:.0f}M symbols at "
        f"{throughput/1e6:.1f}M/s",
    )
