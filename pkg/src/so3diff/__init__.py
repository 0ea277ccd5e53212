"""Rotations in exponential coordinates and their closed-form derivatives."""

from .core import (
    EPS_SMALL,
    AxisAngle,
    NotARotation,
    NotSkew,
    check_rotation,
    exp_rodrigues,
    exp_rodrigues_outer,
    exp_series,
    hat,
    identity_catalog_check,
    log,
    log_axis_angle,
    vec,
    vee,
)
from .jacobians import (
    TaylorPrediction,
    dpoint_classical,
    dpoint_compact,
    drot_classical,
    drot_compact,
    fd_jacobian,
    generators,
    jacobian_vec,
    taylor_predict,
)
from .solver import (
    CorrespondenceSet,
    DegenerateGeometry,
    SingularNormalEquations,
    SolveReport,
    renormalize,
    residual_and_jacobian,
    solve,
    synthesize,
)

__version__ = "0.1.0"
