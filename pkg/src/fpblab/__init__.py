"""
fpblab: exact computation, sampling, and verification for fixed-point-biased
(pattern-avoiding) random permutations.

The measure with bias parameter q > 0 weights a permutation proportionally
to q raised to its number of fixed points, either on all permutations of
length n or on the avoiders of a single length-3 pattern. The lab computes
these laws exactly (big integers and rationals), samples them with seeded
counter-based randomness, and verifies their limit behavior (Poisson,
Bernoulli pair, negative binomial, Rayleigh, normal, and the three-regime
growth of the normalization constant) at desk scale.
"""
from .asymptotics import (
    ConvergenceTable,
    LimitLawSpec,
    RegimePrediction,
    convergence_table,
    dominant_singularity,
    factorial_moment_prediction,
    growth_prediction,
    growth_ratio,
    limit_law,
    mean_coefficient,
    normalization_growth,
    rayleigh_moment,
    regime_of,
    variance_coefficient,
)
from .config import BudgetExceededError, budgets
from .dist import (
    BernoulliSum,
    FixedPointPMF,
    MeasureSpec,
    NegativeBinomial,
    Normal,
    Poisson,
    Provenance,
    Rayleigh,
    UnsupportedMeasureError,
    fp_pmf,
    kolmogorov_distance,
    pmf_from_json,
    pmf_moment,
    pmf_to_json,
    tv_distance,
)
from .perms import (
    PATTERNS,
    EnumerationCapError,
    Permutation,
    avoids,
    contains_pattern,
    enumerate_avoiders,
    enumerate_permutations,
    fixed_points,
    format_perm,
    parse_perm,
    symmetry,
)
from .sampling import (
    DyckPath,
    RandomSource,
    biased_avoider_permutation,
    dyck_to_321_avoider,
    monte_carlo_fp_pmf,
    sample_biased_unrestricted,
    sample_fp_count,
    uniform_avoider,
    uniform_dyck,
)
from .series import (
    ColumnTable,
    QPolynomial,
    SeriesTable,
    avoider_columns,
    avoider_normalization,
    avoider_polynomials,
    avoider_series,
    catalan_numbers,
    derangement_numbers,
    factorial_moment_coefficient,
    factorial_moment_series,
    sqrt_series,
    unrestricted_normalization,
)

__version__ = "0.1.0"
