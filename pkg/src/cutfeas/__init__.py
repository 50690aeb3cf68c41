"""Cyclic cutter methods with extrapolated step sizes for convex feasibility."""

from .cyclic import (
    FIX_TOL,
    CyclicOperator,
    StepPolicy,
    SweepTrace,
    apply_policy,
    extrapolated_step,
    floored_sigma,
    sigma_halfspace,
    sigma_kaczmarz,
    sigma_max_generic,
    sigma_specialized,
    sigma_subgrad,
    sweep,
)
from .operators import (
    AffineFunctional,
    BallFunctional,
    ConvexFunctional,
    CustomCutter,
    HalfSpace,
    Hyperplane,
    SubgradientProjector,
    UsageError,
    as_vector,
    cutter_gap,
    generalized_relaxation,
    project_halfspace,
    project_hyperplane,
    relax,
    subgradient_project,
)
from .problems_io import (
    GeneratorSpec,
    ParseError,
    Problem,
    ValidationError,
    generate,
    parse_problem,
    serialize_problem,
)
from .solver import (
    IterationRecord,
    SolveConfig,
    SolveResult,
    Status,
    fejer_certificate,
    lambda_at,
    solve,
    write_trace_csv,
)

__version__ = "0.1.0"
