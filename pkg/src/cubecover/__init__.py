"""cubecover: weak covering of [0,1]^d by balls around random, beta, Sobol
and vertex point sets -- coverage estimators, Jensen bounds, ball-cube
intersection approximations, and sample-size/radius solvers."""

from .coverage import (
    CoverageQuery,
    approx_covering_radius,
    coverage_design_averaged,
    coverage_design_conditional,
    coverage_product_form,
    jensen_bound_center,
    jensen_bound_refined,
    nearest_distance_sample,
    product_form_approximation,
)
from .estimates import CoverageEstimate
from .geometry import (
    Ball,
    DeltaCube,
    log_unit_ball_volume,
    min_distance_to_set,
    min_squared_distances,
    squared_distance,
    unit_ball_volume,
)
from .intersect import (
    EdgeworthConfig,
    MomentSet,
    ball_probability,
    clt_probability,
    coordinate_moments,
    edgeworth_probability,
    kappa_density_sample,
    mc_intersection_oracle,
    sum_moments,
)
from .sampling import (
    Design,
    PriorKind,
    SamplingScheme,
    SchemeKind,
    TargetPrior,
    hamming_threshold,
    min_hamming_vertex_design,
    sample_design,
    sample_target,
    sample_targets,
)
from .sobol import MAX_DIMENSION, sobol_points
from .solvers import (
    DeltaSweepResult,
    GammaLevel,
    LargeCount,
    NGammaResult,
    asymptotic_radius,
    default_delta_grid,
    delta_sweep,
    empirical_n_gamma,
    empirical_n_gamma_best_delta,
    empirical_radius_quantile,
    n_gamma_asymptotic,
    n_gamma_classical,
    worst_case_n_mixture,
)
from .streams import SeededStream

__version__ = "0.1.0"
