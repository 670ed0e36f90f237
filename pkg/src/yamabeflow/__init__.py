"""Numerical conformal curvature flow on hyperbolic space, radial symmetry.

The package integrates the flow of metrics g(t) = u(t) * g_background on
bounded radial domains, builds the explicit Dirichlet boundary data that
makes bounded-domain solves well posed, runs nested-domain exhaustion
studies, and verifies the quantitative barriers the continuum theory
guarantees: the two-sided sandwich around the big-bang flow, two-sided
curvature bounds, flow ordering, and the bounded-length criterion that
separates instantaneously complete from everywhere-incomplete evolutions.
"""

from .errors import (
    ConfigurationError,
    DomainError,
    InvalidFieldError,
    StepFailureError,
    YamabeFlowError,
)
from .geometry import (
    Background,
    RadialField,
    RadialMesh,
    flat_conformal_factor,
    laplacian_coefficient,
    log_polar_from_radius,
    log_polar_values,
    poincare_radius,
    radial_length,
    radius_from_log_polar,
    radius_from_poincare,
    sphere_area,
)
from .initial_data import (
    Bump,
    Constant,
    DataBounds,
    FlatStatic,
    PowerLaw,
    PuncturedSphere,
    data_bounds,
    initial_scalar_curvature,
    make_initial,
    preset_from_spec,
)
from .boundary_data import (
    BoundaryProfile,
    check_profile_bounds,
    frozen_boundary,
    largest_admissible_eps,
    profile_from_data,
    ramp,
    ramp_slope,
)
from .solver import (
    CurvaturePair,
    FlowState,
    FlowTrajectory,
    SolveConfig,
    curvature_pair,
    evolution_residual,
    solve,
    step,
)
from .exhaustion import (
    ConvergenceReport,
    ExhaustionPlan,
    ExhaustionResult,
    ExtensionResult,
    extend_time,
    run_exhaustion,
)
from .diagnostics import (
    BarrierReport,
    ComparisonReport,
    CompletenessReport,
    DiagnosticsReport,
    area_difference_J,
    check_barriers,
    compare_flows,
    completeness_scan,
    gradient_quantity_sup,
)
from .export import export_trajectory, import_trajectory

__version__ = "0.1.0"
