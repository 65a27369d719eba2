"""Inverse-optimal and universal stabilization on the positive orthant.

The package designs positive scalar feedback for control-affine systems
evolving on the open positive orthant, prices each design by the running
cost it minimizes, and verifies the pricing pointwise. Input shaping is
organized around contractor curves, their expander inverses, and the
penalty functions the two induce; the predator-prey benchmark ties all of
it to a concrete ecosystem model.
"""

from .direct import (
    DirectDesign,
    admissible_r_interval,
    continuous_feedback,
    direct_design,
    direct_feedback,
    in_admissible_set,
    midpoint_r,
    pricing_residuals,
    q_direct,
    sqrt_mean_r,
    volterra_direct,
    weight_for,
)
from .errors import (
    BracketError,
    ConfigError,
    ConstraintError,
    ContractViolationError,
    DivergenceError,
    DomainError,
    InfeasibleError,
    OrthantError,
    QuadratureError,
)
from .redesign import (
    RedesignProblem,
    check_sign_alignment,
    penalty_product,
    predprey_redesign,
    redesign_weight_r,
    redesigned_feedback,
)
from .reporting import CheckReport, ConditionCheck
from .shaping import (
    Contractor,
    Expander,
    Penalty,
    SlopeBridge,
    contractor,
    custom_contractor,
    expander,
    penalty_from_contractor,
    slope_bridge,
    validate_contractor,
)
from .sim import (
    CostSummary,
    IntegratorOptions,
    TrajectoryRecord,
    accumulate_cost,
    hjb_residual,
    integrate,
    lyapunov_monotonicity,
    write_json,
    write_trajectory_csv,
)
from .suites import run_property_suite
from .systems import (
    ControlAffineSystem,
    ControlLyapunov,
    LiePair,
    available_systems,
    get_system,
    lie_pair,
    register_system,
)
from .universal import (
    UniversalEval,
    half_universal,
    universal_basic,
    universal_invopt,
)

from . import predprey

__version__ = "0.1.0"

__all__ = [
    "BracketError",
    "CheckReport",
    "ConditionCheck",
    "ConfigError",
    "ConstraintError",
    "ContractViolationError",
    "Contractor",
    "ControlAffineSystem",
    "ControlLyapunov",
    "CostSummary",
    "DirectDesign",
    "DivergenceError",
    "DomainError",
    "Expander",
    "InfeasibleError",
    "IntegratorOptions",
    "LiePair",
    "OrthantError",
    "Penalty",
    "QuadratureError",
    "RedesignProblem",
    "SlopeBridge",
    "TrajectoryRecord",
    "UniversalEval",
    "accumulate_cost",
    "admissible_r_interval",
    "available_systems",
    "check_sign_alignment",
    "continuous_feedback",
    "contractor",
    "custom_contractor",
    "direct_design",
    "direct_feedback",
    "expander",
    "get_system",
    "half_universal",
    "hjb_residual",
    "in_admissible_set",
    "integrate",
    "lie_pair",
    "lyapunov_monotonicity",
    "midpoint_r",
    "penalty_from_contractor",
    "penalty_product",
    "predprey",
    "predprey_redesign",
    "pricing_residuals",
    "q_direct",
    "redesign_weight_r",
    "redesigned_feedback",
    "register_system",
    "run_property_suite",
    "slope_bridge",
    "sqrt_mean_r",
    "universal_basic",
    "universal_invopt",
    "validate_contractor",
    "volterra_direct",
    "weight_for",
    "write_json",
    "write_trajectory_csv",
]
