"""Exact moments, tail bounds, and normal-approximation arithmetic.

Pair probabilities, means, and variances of descent and inversion counts of
a random multiset permutation are evaluated in exact rational arithmetic;
floats appear only at the reporting boundary.  The two explicit Stein-method
error bounds for the size-bias coupling are provided as plain float
formulas over caller-supplied moment and coupling quantities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Optional, Tuple, Union

from .core_stats import Multiset
from .errors import DegenerateError, DomainError, InputError, PreconditionError

_ALLOWED_STATISTICS = ("inversions", "descents")


class PairProbabilities:
    """Exact probabilities of inverted index-pair configurations.

    For a uniformly random arrangement of the multiset: p1 is the chance one
    index pair is inverted; p234 the chance two pairs sharing one index are
    both inverted, summed over the three sharing shapes; p4 the adjacent-pair
    sharing shape alone; p5 the chance two disjoint pairs are both inverted.
    Each quantity needs enough elements for its configuration to exist, so
    accessors raise DomainError below n = 2, 3, 3, 4 respectively.
    """

    def __init__(self, multiset: Multiset):
        n = multiset.n
        s2 = multiset.power_sum(2)
        s3 = multiset.power_sum(3)
        self.n = n
        self._p1: Optional[Fraction] = None
        self._p234: Optional[Fraction] = None
        self._p4: Optional[Fraction] = None
        self._p5: Optional[Fraction] = None
        if n >= 2:
            self._p1 = Fraction(n * n - s2, 2 * n * (n - 1))
        if n >= 3:
            d3 = n * (n - 1) * (n - 2)
            num234 = (
                Fraction(5 * n**3, 6)
                - n * n
                + (Fraction(-3 * n, 2) + 1) * s2
                + Fraction(2 * s3, 3)
            )
            self._p234 = num234 / d3
            self._p4 = (Fraction(n**3, 6) - Fraction(n * s2, 2) + Fraction(s3, 3)) / d3
        if n >= 4:
            d4 = n * (n - 1) * (n - 2) * (n - 3)
            num5 = (
                Fraction(n**4, 4)
                - n**3
                + Fraction(n * n, 2)
                + Fraction(s2 * s2, 4)
                + (Fraction(-n * n, 2) + 2 * n - Fraction(1, 2)) * s2
                - s3
            )
            self._p5 = num5 / d4

    def _get(self, name: str, value: Optional[Fraction], minimum: int) -> Fraction:
        if value is None:
            raise DomainError(f"{name} requires n >= {minimum}, got n = {self.n}")
        return value

    @property
    def p1(self) -> Fraction:
        return self._get("p1", self._p1, 2)

    @property
    def p234(self) -> Fraction:
        return self._get("p234", self._p234, 3)

    @property
    def p4(self) -> Fraction:
        return self._get("p4", self._p4, 3)

    @property
    def p5(self) -> Fraction:
        return self._get("p5", self._p5, 4)


def pair_probabilities(multiset: Multiset) -> PairProbabilities:
    """Exact inverted-pair configuration probabilities for the multiset."""
    return PairProbabilities(multiset)


@dataclass(frozen=True)
class MomentSummary:
    """Exact mean and variance of one statistic, with float projections."""

    statistic: str
    mu: Fraction
    sigma2: Fraction

    def __post_init__(self):
        if self.statistic not in _ALLOWED_STATISTICS:
            raise InputError(f"unknown statistic {self.statistic!r}")
        if self.sigma2 < 0:
            raise InputError("variance cannot be negative")

    @property
    def mu_f(self) -> float:
        return float(self.mu)

    @property
    def sigma_f(self) -> float:
        return math.sqrt(float(self.sigma2))


def inversion_moments(multiset: Multiset) -> MomentSummary:
    """Exact mean and variance of the inversion count.

    The variance groups index-pair covariances by how many indices the two
    pairs share: C(n,2) single-pair terms, 2*C(n,3) one-shared-index terms,
    6*C(n,4) disjoint terms.  Terms whose combinatorial coefficient is zero
    are skipped, which makes the formula exact down to n = 1.
    """
    n = multiset.n
    mu = Fraction(n * n - multiset.power_sum(2), 4)
    probs = pair_probabilities(multiset)
    sigma2 = Fraction(0)
    if n >= 2:
        p1 = probs.p1
        sigma2 += Fraction(n * (n - 1), 2) * (p1 - p1 * p1)
    if n >= 3:
        p1 = probs.p1
        sigma2 += Fraction(2 * n * (n - 1) * (n - 2), 6) * (probs.p234 - 3 * p1 * p1)
    if n >= 4:
        p1 = probs.p1
        sigma2 += Fraction(6 * n * (n - 1) * (n - 2) * (n - 3), 24) * (
            probs.p5 - p1 * p1
        )
    return MomentSummary(statistic="inversions", mu=mu, sigma2=sigma2)


def descent_moments(multiset: Multiset) -> MomentSummary:
    """Exact mean and variance of the descent count.

    The variance groups adjacent-pair covariances by overlap: n-1 single
    terms, 2(n-2) overlapping-neighbour terms, (n-2)(n-3) disjoint terms.
    Zero-coefficient terms are skipped, making the formula exact down to
    n = 1.
    """
    n = multiset.n
    mu = Fraction(n * n - multiset.power_sum(2), 2 * n)
    probs = pair_probabilities(multiset)
    sigma2 = Fraction(0)
    if n >= 2:
        p1 = probs.p1
        sigma2 += (n - 1) * (p1 - p1 * p1)
    if n >= 3:
        p1 = probs.p1
        sigma2 += 2 * (n - 2) * (probs.p4 - p1 * p1)
    if n >= 4:
        p1 = probs.p1
        sigma2 += (n - 2) * (n - 3) * (probs.p5 - p1 * p1)
    return MomentSummary(statistic="descents", mu=mu, sigma2=sigma2)


def zscore(value: Union[int, Fraction], summary: MomentSummary) -> float:
    """(value - mu)/sigma with the float conversion at the last step."""
    if summary.sigma2 == 0:
        raise DegenerateError("statistic is almost surely constant, z-score undefined")
    delta = Fraction(value) - summary.mu
    z2 = delta * delta / summary.sigma2
    return math.copysign(math.sqrt(float(z2)), float(delta))


def normal_cdf(x: float) -> float:
    """Standard normal distribution function, accurate to 1e-10 on [-8, 8]."""
    if not math.isfinite(x):
        raise InputError("normal_cdf requires a finite argument")
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


@dataclass(frozen=True)
class BoundReport:
    """Exact evaluation of the count-vector inequalities behind the variance
    lower bounds, at beta = max(1/2, alpha).

    The quadratic and cubic inequalities lower-bound n^2 - sum n_a^2 and
    n^3 - sum n_a^3; the quartic one two-sidedly bounds the disjoint-pair
    covariance combination n^4/3 + (sum n_a^2)^2 - (4n/3) sum n_a^3.
    """

    beta: Fraction
    quadratic_lower: Fraction
    quadratic_value: Fraction
    cubic_lower: Fraction
    cubic_value: Fraction
    quartic_lower: Fraction
    quartic_value: Fraction
    quartic_upper: Fraction

    @property
    def quadratic_ok(self) -> bool:
        return self.quadratic_lower <= self.quadratic_value

    @property
    def cubic_ok(self) -> bool:
        return self.cubic_lower <= self.cubic_value

    @property
    def quartic_lower_ok(self) -> bool:
        return self.quartic_lower <= self.quartic_value

    @property
    def quartic_upper_ok(self) -> bool:
        return self.quartic_value <= self.quartic_upper

    @property
    def satisfied(self) -> bool:
        return (
            self.quadratic_ok
            and self.cubic_ok
            and self.quartic_lower_ok
            and self.quartic_upper_ok
        )


def beta_bound_check(multiset: Multiset, alpha: Union[float, Fraction]) -> BoundReport:
    """Evaluate both sides of the four count-vector inequalities exactly.

    Requires n_a <= alpha*n for every symbol.  alpha may be a Fraction for
    exact extremal checks; floats are converted exactly, so alpha=0.6 is the
    binary float nearest 3/5, not 3/5 itself.
    """
    if isinstance(alpha, Rational):
        alpha_f = Fraction(alpha)
    else:
        alpha_f = Fraction(float(alpha))
    if not (0 < alpha_f < 1):
        raise InputError("alpha must lie strictly between 0 and 1")
    n = multiset.n
    for idx, c in enumerate(multiset.counts):
        if c > alpha_f * n:
            raise PreconditionError(
                f"count of symbol index {idx} is {c}, exceeding alpha*n = {float(alpha_f * n):g}"
            )
    beta = max(Fraction(1, 2), alpha_f)
    s2 = multiset.power_sum(2)
    s3 = multiset.power_sum(3)
    return BoundReport(
        beta=beta,
        quadratic_lower=2 * beta * (1 - beta) * n**2,
        quadratic_value=Fraction(n**2 - s2),
        cubic_lower=3 * beta * (1 - beta) * n**3,
        cubic_value=Fraction(n**3 - s3),
        quartic_lower=(beta**4 - 4 * beta**2 + 4 * beta - 1) * n**4,
        quartic_value=Fraction(n**4, 3) + s2 * s2 - Fraction(4 * n * s3, 3),
        quartic_upper=Fraction(n**4, 3),
    )


def stein_smooth_bound(
    mu: float,
    sigma: float,
    varE: float,
    e_delta_sq: float,
    h_norm: float,
    dh_norm: float,
) -> float:
    """Smooth-test-function normal approximation error bound.

    Bounds |E h((W - mu)/sigma) - E h(Z)| for a bounded differentiable test
    function with bounds h_norm and dh_norm, given the variance of the
    conditional coupling shift E(W* - W | W) and the second moment
    E (W* - W)^2.
    """
    for name, v in (
        ("mu", mu),
        ("sigma", sigma),
        ("varE", varE),
        ("e_delta_sq", e_delta_sq),
        ("h_norm", h_norm),
        ("dh_norm", dh_norm),
    ):
        if v < 0:
            raise InputError(f"{name} must be non-negative")
    if sigma <= 0:
        raise InputError("sigma must be positive")
    return 2 * h_norm * mu / sigma**2 * math.sqrt(varE) + dh_norm * mu / sigma**3 * e_delta_sq


def stein_kolmogorov_bound(mu: float, sigma: float, B: float, varE: float) -> float:
    """Kolmogorov-distance bound for a size-bias coupling with |W* - W| <= B.

    Valid only when B <= sigma**1.5 / sqrt(6 mu); outside that range the
    underlying theorem is unproven, so the call refuses rather than clamps.
    """
    if mu <= 0 or sigma <= 0:
        raise InputError("mu and sigma must be positive")
    if B < 0 or varE < 0:
        raise InputError("B and varE must be non-negative")
    limit = sigma**1.5 / math.sqrt(6.0 * mu)
    if B > limit:
        raise PreconditionError(
            f"coupling bound B = {B:g} exceeds sigma^1.5/sqrt(6 mu) = {limit:g}; "
            "the Kolmogorov bound does not apply"
        )
    A = B / sigma
    return 0.4 * A + mu / sigma * (64 * A**2 + 4 * A**3) + 23 * mu / sigma**2 * math.sqrt(varE)
