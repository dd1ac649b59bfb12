"""Descent and inversion statistics of multiset permutations.

Streaming computation of the statistics and their pair-count tables, exact
rational moments, size-bias coupling samplers and diagnostics, explicit
normal-approximation error bounds, brute-force enumeration oracles, and a
command-line surface for sequence files (FASTA or plain text).
"""

from .core_stats import (
    Alphabet,
    Multiset,
    Ordering,
    PairTableBuilder,
    PairTables,
    SymbolSequence,
    build_pair_tables,
    count_descents,
    count_inversions,
    stats_from_pair_tables,
)
from .coupling import (
    CouplingOutcome,
    RandomSource,
    conditional_mean_shift,
    estimate_varE,
    ks_distance,
    sample_descent_coupling,
    sample_inversion_coupling,
    sample_uniform_permutation,
)
from .errors import (
    CapacityError,
    DegenerateError,
    DomainError,
    InputError,
    PreconditionError,
    StatError,
    ValidationError,
)
from .fixtures import chromosome19_tables
from .moments import (
    BoundReport,
    MomentSummary,
    PairProbabilities,
    beta_bound_check,
    descent_moments,
    inversion_moments,
    normal_cdf,
    pair_probabilities,
    stein_kolmogorov_bound,
    stein_smooth_bound,
    zscore,
)
from .oracle import (
    ExactDistribution,
    classical_inversion_distribution,
    enumerate_permutations,
    exact_coupling_distribution,
    exact_distribution,
    exact_size_biased_distribution,
    size_biased_law,
)

__version__ = "1.0.0"

__all__ = [
    "Alphabet",
    "BoundReport",
    "CapacityError",
    "CouplingOutcome",
    "DegenerateError",
    "DomainError",
    "ExactDistribution",
    "InputError",
    "MomentSummary",
    "Multiset",
    "Ordering",
    "PairProbabilities",
    "PairTableBuilder",
    "PairTables",
    "PreconditionError",
    "RandomSource",
    "StatError",
    "SymbolSequence",
    "ValidationError",
    "beta_bound_check",
    "build_pair_tables",
    "chromosome19_tables",
    "classical_inversion_distribution",
    "conditional_mean_shift",
    "count_descents",
    "count_inversions",
    "descent_moments",
    "enumerate_permutations",
    "estimate_varE",
    "exact_coupling_distribution",
    "exact_distribution",
    "exact_size_biased_distribution",
    "inversion_moments",
    "ks_distance",
    "normal_cdf",
    "pair_probabilities",
    "sample_descent_coupling",
    "sample_inversion_coupling",
    "sample_uniform_permutation",
    "size_biased_law",
    "stats_from_pair_tables",
    "stein_kolmogorov_bound",
    "stein_smooth_bound",
    "zscore",
]
