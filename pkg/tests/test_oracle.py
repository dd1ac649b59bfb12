"""Exact enumeration oracles and their consistency with the closed forms."""

import math
from fractions import Fraction

import numpy as np
import pytest

from desinv import (
    ExactDistribution,
    Multiset,
    classical_inversion_distribution,
    descent_moments,
    enumerate_permutations,
    exact_coupling_distribution,
    exact_distribution,
    exact_size_biased_distribution,
    inversion_moments,
    size_biased_law,
)
from desinv.errors import CapacityError, DegenerateError, InputError, ValidationError
from desinv.oracle import (
    CLASSICAL_GUARD_N,
    COUPLING_GUARD_H,
    COUPLING_GUARD_N,
    ENUMERATION_GUARD,
    multinomial,
)

from conftest import brute_arrangements, brute_law

SMALL_MULTISETS = [(2, 1), (1, 1, 1), (2, 2), (3, 1), (2, 1, 1), (2, 2, 1), (1, 1, 1, 1)]


class TestExactDistribution:
    def test_moments(self):
        dist = ExactDistribution({0: Fraction(1, 4), 2: Fraction(3, 4)})
        assert dist.probability(2) == Fraction(3, 4)
        assert dist.probability(5) == 0
        assert dist.mean() == Fraction(3, 2)
        assert dist.second_moment() == 3
        assert dist.variance() == Fraction(3, 4)

    def test_rejects_bad_mass(self):
        with pytest.raises(ValidationError):
            ExactDistribution({0: Fraction(1, 2)})
        with pytest.raises(ValidationError):
            ExactDistribution({0: Fraction(3, 2), 1: Fraction(-1, 2)})
        with pytest.raises(ValidationError):
            ExactDistribution({-1: Fraction(1)})


class TestEnumeration:
    def test_multinomial(self):
        assert multinomial(Multiset((2, 1))) == 3
        assert multinomial(Multiset((3, 3))) == 20
        assert multinomial(Multiset((1, 1, 1, 1))) == 24

    @pytest.mark.parametrize("counts", SMALL_MULTISETS)
    def test_enumerates_every_arrangement_once(self, counts):
        seen = [
            tuple(int(v) for v in next(seq.chunks()))
            for seq in enumerate_permutations(Multiset(counts))
        ]
        assert len(seen) == multinomial(Multiset(counts))
        assert seen == sorted(set(seen))  # lexicographic, no repeats
        assert set(seen) == set(brute_arrangements(counts))

    def test_guard(self):
        # 26 choose 13 is just above the enumeration guard
        assert multinomial(Multiset((13, 13))) > ENUMERATION_GUARD
        with pytest.raises(CapacityError):
            exact_distribution(Multiset((13, 13)), "descents")


class TestExactLaws:
    @pytest.mark.parametrize("counts", SMALL_MULTISETS)
    @pytest.mark.parametrize("statistic", ["descents", "inversions"])
    def test_matches_independent_brute_force(self, counts, statistic):
        dist = exact_distribution(Multiset(counts), statistic)
        assert dist.support == brute_law(counts, statistic)

    @pytest.mark.parametrize("counts", SMALL_MULTISETS)
    def test_moments_match_closed_forms(self, counts):
        m = Multiset(counts)
        inv = exact_distribution(m, "inversions")
        des = exact_distribution(m, "descents")
        assert inv.mean() == inversion_moments(m).mu
        assert inv.variance() == inversion_moments(m).sigma2
        assert des.mean() == descent_moments(m).mu
        assert des.variance() == descent_moments(m).sigma2

    def test_unknown_statistic(self):
        with pytest.raises(InputError):
            exact_distribution(Multiset((1, 1)), "majors")


class TestSizeBias:
    def test_two_symbol_example(self):
        # {1, 2} has one arrangement with the inversion and one without,
        # so the size-biased inversion count is identically 1
        law = exact_size_biased_distribution(Multiset((1, 1)), "inversions")
        assert law.support == {1: Fraction(1)}

    def test_shifts_mass_upward(self):
        m = Multiset((2, 2, 1))
        plain = exact_distribution(m, "inversions")
        biased = exact_size_biased_distribution(m, "inversions")
        assert biased.mean() > plain.mean()
        assert biased.mean() == plain.second_moment() / plain.mean()
        assert 0 not in biased.support

    def test_degenerate_refused(self):
        with pytest.raises(DegenerateError):
            size_biased_law(ExactDistribution({0: Fraction(1)}))


class TestCouplingDistribution:
    def test_descent_constant_case(self):
        law = exact_coupling_distribution(Multiset((2, 1)), "descents")
        assert law.support == {1: Fraction(1)}

    @pytest.mark.parametrize("counts", [(2, 1), (2, 2), (3, 2), (2, 2, 2), (4, 1)])
    @pytest.mark.parametrize("statistic", ["descents", "inversions"])
    def test_equals_size_biased_law(self, counts, statistic):
        # the defining property of the coupling construction
        m = Multiset(counts)
        assert (
            exact_coupling_distribution(m, statistic).support
            == exact_size_biased_distribution(m, statistic).support
        )

    def test_guards(self):
        with pytest.raises(CapacityError):
            exact_coupling_distribution(Multiset((4, 3)), "descents")
        with pytest.raises(CapacityError):
            exact_coupling_distribution(Multiset((1, 1, 1, 1)), "descents")
        with pytest.raises(DegenerateError):
            exact_coupling_distribution(Multiset((3,)), "inversions")
        with pytest.raises(InputError):
            exact_coupling_distribution(Multiset((1,)), "inversions")


class TestClassicalInversions:
    def test_three_elements(self):
        law = classical_inversion_distribution(3)
        assert law.support == {
            0: Fraction(1, 6),
            1: Fraction(2, 6),
            2: Fraction(2, 6),
            3: Fraction(1, 6),
        }

    @pytest.mark.parametrize("n", range(1, 8))
    def test_matches_enumeration(self, n):
        law = classical_inversion_distribution(n)
        assert law.support == exact_distribution(Multiset((1,) * n), "inversions").support

    @pytest.mark.parametrize("n", [1, 2, 5, 20, 60, 100])
    def test_closed_form_moments(self, n):
        law = classical_inversion_distribution(n)
        assert law.mean() == Fraction(math.comb(n, 2), 2)
        assert law.variance() == Fraction(n * (n - 1) * (2 * n + 5), 72)

    def test_support_size_and_symmetry(self):
        n = 12
        law = classical_inversion_distribution(n)
        top = n * (n - 1) // 2
        assert set(law.support) == set(range(top + 1))
        assert all(law.probability(k) == law.probability(top - k) for k in law.support)

    def test_guards(self):
        with pytest.raises(InputError):
            classical_inversion_distribution(0)
        with pytest.raises(CapacityError):
            classical_inversion_distribution(CLASSICAL_GUARD_N + 1)


def test_guard_constants():
    assert ENUMERATION_GUARD == 10**7
    assert COUPLING_GUARD_N == 6
    assert COUPLING_GUARD_H == 3
    assert CLASSICAL_GUARD_N == 100
