"""Exact-arithmetic machinery for bi-monotonic independence.

Partition combinatorics indexed by left/right words, moment-cumulant
transforms, moment- and transform-level convolution, the semigroup flow of
Cauchy transforms, a finite-dimensional product-space model, and exact
moment-matrix positivity verdicts.
"""

from .convolution import (
    OrderedFamily,
    convolve,
    convolve_moment,
    grid_convolve,
    multi_family_moment,
    two_family_moment,
)
from .cumulants import (
    CumulantTable,
    TimePolynomial,
    cumulant_from_moments,
    cumulant_table_from_moments,
    dot_moment,
    grid_cumulant_table,
    moment_from_cumulants,
    phi_t,
)
from .distributions import (
    AtomicPlanarMeasure,
    GridDistribution,
    WordDistribution,
    as_fraction,
    grid_from_measure,
    moment_of,
    word_from_grid,
)
from .errors import (
    BimonoError,
    IncompleteTableError,
    InvalidInputError,
    ResourceLimitError,
    SingularSeriesError,
    UnsupportedParametersError,
)
from .limits import (
    LimitSpec,
    limit_convergence_check,
    limit_cumulants,
    limit_moment_grid,
    limit_pipeline,
)
from .partitions import (
    OrderedPartition,
    chi_intervals,
    chi_order,
    complement_intervals,
    enumerate_bm,
    enumerate_bnc,
    is_interior,
    pi_chi_omega,
    restrict_chi,
)
from .positivity import (
    PsdVerdict,
    RationalMatrix,
    det_exact,
    moment_matrix,
    psd_check,
)
from .series import (
    TruncatedSeries1,
    TruncatedSeries2,
    cauchy_from_grid,
    clt_closed_form,
    compound_poisson_generating,
    convolve_transform,
    evolve_joint,
    evolve_marginal,
    f_transform,
    f_z_coefficients,
    generating_functions,
    grid_from_cauchy,
    h_series,
    marginal_cauchy,
    semigroup_check,
    series_ddt0,
    series_eval_t,
)
from .type2 import (
    LocalOperator,
    PointedSpace,
    ProductVector,
    lambda_action,
    rho_action,
    type2_moment,
    vacuum,
)

__version__ = "0.1.0"
