"""Normal approximation of lattice random variables driven by the root
geometry of their probability generating functions: exact distances to the
standard normal, cumulant control, harmonic-function positivity checks,
Brownian exit estimates, sharpness constructions, and strong-Rayleigh
multivariate projections.
"""

from .dist import (
    DiscretePMF,
    MomentSummary,
    convolve,
    cumulants_from_pmf,
    kolmogorov_distance,
    moments,
    scale_support,
)
from .roots import (
    PGFPoly,
    RootGeometry,
    RootSet,
    find_roots,
    log_potential,
    normalize,
    poly_from_roots,
    root_geometry,
)
from .series import TruncatedSeries
from .cumulants import (
    CumulantSeq,
    cumulants_from_roots,
    dominant_term_search,
    negcos_extrema,
    tail_ratio,
    tame_cumulants,
)
from .harmonic import (
    BallSpec,
    CheckReport,
    GridSpec,
    SectorSpec,
    b_decreasing_check,
    certified_b,
    difference_eval,
    end_bound,
    money_check,
    poisson_density_ball,
    weak_positivity_check,
)
from .brownian import (
    ExitEstimate,
    MeanValueReport,
    RectangleSpec,
    WosConfig,
    estimate_exit_rectangle,
    estimate_exit_sector,
    mean_value_check,
)
from .clt import (
    BoundReport,
    GrowthSpec,
    RemainderSeries,
    characteristic_star,
    esseen_bound,
    paper_bound,
    paper_bound_log2,
    remainder_eval,
    verify_normal_approx,
)
from .construct import (
    ConstructionResult,
    construct_ball_sharp,
    construct_sector_sharp,
    discrete_lower_bound,
    poisson_scaled,
    seed_sector_pgf,
    solve_rho_for_variance,
)
from .multivar import (
    CovStats,
    DirectionVector,
    MultiPGF,
    covariance_stats,
    project,
    projection_sector_check,
    stable_product_generator,
)

__all__ = [
    "DiscretePMF",
    "MomentSummary",
    "moments",
    "cumulants_from_pmf",
    "convolve",
    "scale_support",
    "kolmogorov_distance",
    "PGFPoly",
    "RootSet",
    "RootGeometry",
    "normalize",
    "find_roots",
    "root_geometry",
    "log_potential",
    "poly_from_roots",
    "TruncatedSeries",
    "CumulantSeq",
    "cumulants_from_roots",
    "tail_ratio",
    "dominant_term_search",
    "tame_cumulants",
    "negcos_extrema",
    "SectorSpec",
    "BallSpec",
    "GridSpec",
    "CheckReport",
    "weak_positivity_check",
    "b_decreasing_check",
    "certified_b",
    "difference_eval",
    "money_check",
    "poisson_density_ball",
    "end_bound",
    "RectangleSpec",
    "WosConfig",
    "ExitEstimate",
    "MeanValueReport",
    "estimate_exit_rectangle",
    "estimate_exit_sector",
    "mean_value_check",
    "GrowthSpec",
    "RemainderSeries",
    "BoundReport",
    "characteristic_star",
    "remainder_eval",
    "esseen_bound",
    "paper_bound",
    "paper_bound_log2",
    "verify_normal_approx",
    "ConstructionResult",
    "seed_sector_pgf",
    "solve_rho_for_variance",
    "construct_sector_sharp",
    "construct_ball_sharp",
    "poisson_scaled",
    "discrete_lower_bound",
    "MultiPGF",
    "DirectionVector",
    "CovStats",
    "project",
    "covariance_stats",
    "stable_product_generator",
    "projection_sector_check",
]
