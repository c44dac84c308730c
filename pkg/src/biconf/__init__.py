"""Einstein 4-metrics from biconformal deformations of flat R^4.

The library deforms the Euclidean metric by independent factors
1/sigma^2 on the (x1, x2) plane and 1/rho^2 on the (x3, x4) plane,
evaluates the resulting Ricci curvature in closed form, and
cross-checks every formula against a finite-difference curvature
engine.  Two ODE-generated families of Einstein metrics are provided,
with blow-up detection and end diagnostics.
"""

from .expr import DomainError, ParseError, parse_expr, pretty
from .fields import (
    CallableField,
    ExpressionField,
    PositivityError,
    ProfileField,
    ScalarField,
    as_point,
    constant_field,
)
from .oracle import (
    CurvatureReport,
    InvalidMetricError,
    MetricField,
    OracleError,
    SingularMetricError,
    christoffel,
    curvature_report,
    einstein_residual_fd,
    euclidean_metric,
    laplace_beltrami_fd,
    ricci_fd,
    riemann_fd,
    scalar_fd,
)
from .deform import (
    DeformationPair,
    FrameRicci,
    TransformationLaws,
    conformal_ricci_coords,
    deformed_laplacian,
    frame_to_coords,
    horizontal_commutator,
    metric_of,
    ricci_frame,
    ricci_horizontal,
    ricci_mixed,
    ricci_vertical,
    transformation_laws,
)
from .families import (
    BLOW_UP,
    REACHED_T_MAX,
    SINGULAR_GAMMA,
    EndDiagnostics,
    FamilyParams,
    Trajectory,
    WarpedState,
    einstein_constant,
    einstein_residuals,
    end_diagnostics,
    family_fields,
    family_metric,
    hyperbolic_fields,
    implicit_time,
    integrate_rho,
    integrate_warped,
    rho_rhs,
    ricci_flat_fields,
    sigma_from_rho,
    single_param_residuals,
    warped_integral,
    warped_residuals,
    warped_rhs,
)

__version__ = "0.1.0"
