"""Vague convergence of boundedly finite measures.

Spaces with a boundedness and its Hu metric, exact Prohorov-type distances
between atomic measures, Lipschitz test functions, deterministic convergence
diagnostics and Laplace-functional tests for random point measures.
"""
from .boundedness import (
    GroundSpace,
    SpaceMismatchError,
    base_metric,
    bump,
    hu_metric,
    in_level,
    interior_depth,
    is_bounded,
    localizing_set,
    pairwise,
    region_distance,
)
from .convergence import (
    CATALOGUE,
    EXTRA_SEQUENCES,
    BoundaryMassError,
    CountMismatchError,
    CrossReport,
    Matching,
    MeasureSequence,
    Verdict,
    catalogue_entry,
    check_point_matching,
    check_portmanteau,
    check_vague_functions,
    check_vague_metric,
    cross_validate,
    match_points,
)
from .functions import (
    Bump,
    Cone,
    FunctionFamily,
    LowerApprox,
    Product,
    TestFunction,
    UnboundedThickeningError,
    UpperApprox,
    Zero,
    induced_metric,
    lipschitz_battery,
    lower_approx,
    multiplicative_family,
    upper_approx,
)
from .measures import DiscreteMeasure, LocallyFiniteMeasure, truncate
from .metrics import (
    DeficiencyCertificate,
    NotProbabilityError,
    SizeCapError,
    deficiency,
    finite_measure_dist,
    prohorov,
    prohorov_oracle,
    vague_dist,
)
from .random_measures import (
    IntensityMeasure,
    LaplaceReport,
    RandomMeasureModel,
    deterministic_model,
    extremes_model,
    laplace_extremes_exact,
    laplace_mc,
    laplace_mc_many,
    laplace_poisson_exact,
    poisson_model,
    sample_empirical_extremes,
    sample_poisson,
    test_convergence_in_distribution,
)
from .regions import Annulus, Ball, Box, Interval, Union, Whole

__version__ = "0.1.0"
