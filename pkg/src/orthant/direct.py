"""Direct inverse-optimal design from shifted Lyapunov rate pairs.

Everything here works pointwise on the shifted pair (a, b): a is the
Lyapunov rate at the equilibrium input, b the rate per unit of input shift.
Choosing an input weight r from the admissible interval and shaping the
input penalty with a contractor yields a strictly positive input, a strict
Lyapunov decrease, and a positive running state cost, tied together by two
pricing identities that hold exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .errors import ConstraintError, DomainError, InfeasibleError
from .shaping import (
    Contractor,
    Penalty,
    SlopeBridge,
    contractor,
    penalty_from_contractor,
    slope_bridge,
)

__all__ = [
    "DirectDesign",
    "direct_design",
    "in_admissible_set",
    "admissible_r_interval",
    "midpoint_r",
    "sqrt_mean_r",
    "weight_for",
    "direct_feedback",
    "q_direct",
    "pricing_residuals",
    "continuous_feedback",
    "volterra_direct",
]

WeightRule = Callable[[float, float], float]


@dataclass(frozen=True)
class DirectDesign:
    """A contractor, its induced penalty, the slope bridge between them, and
    the rule picking the input weight inside the admissible interval."""

    contractor: Contractor
    penalty: Penalty
    bridge: SlopeBridge
    r_rule: str | WeightRule = "midpoint"


def direct_design(
    kind: Contractor | str = "volterra",
    *,
    r_rule: str | WeightRule = "midpoint",
    penalty: Penalty | None = None,
) -> DirectDesign:
    c = contractor(kind) if isinstance(kind, str) else kind
    if penalty is None:
        penalty = penalty_from_contractor(c)
    return DirectDesign(
        contractor=c,
        penalty=penalty,
        bridge=slope_bridge(c, penalty),
        r_rule=r_rule,
    )


def in_admissible_set(a: float, b: float) -> bool:
    """Whether some positive input gives a nonpositive Lyapunov rate: b < 0,
    or a < 0, or the equilibrium pair (0, 0)."""
    return b < 0.0 or a < 0.0 or (a == 0.0 and b == 0.0)


def admissible_r_interval(design: DirectDesign, a: float, b: float) -> tuple[float, float]:
    """Open interval of input weights for which the design is stabilizing
    with positive state cost.

    For b >= 0 the design rests at the equilibrium input and the weight is
    pinned at infinity. For b < 0 the lower endpoint -b keeps the shifted
    input positive; with a > 0 the upper endpoint keeps the state cost
    positive and comes from the slope bridge.
    """
    if not in_admissible_set(a, b):
        raise InfeasibleError(f"no admissible positive input at (a, b) = ({a}, {b})")
    if b >= 0.0:
        return (math.inf, math.inf)
    if a <= 0.0:
        return (-b, math.inf)
    zeta = design.bridge.slope_for_ratio(1.0 - a / b)
    return (-b, -b / zeta)


def _finite_interval(design: DirectDesign, a: float, b: float) -> tuple[float, float] | None:
    lo, hi = admissible_r_interval(design, a, b)
    if math.isinf(lo) or math.isinf(hi):
        return None
    if hi <= lo:
        raise ConstraintError(
            f"admissible weight interval ({lo}, {hi}) is empty at (a, b) = "
            f"({a}, {b}) for this contractor"
        )
    return lo, hi


def midpoint_r(design: DirectDesign, a: float, b: float) -> float:
    """Arithmetic midpoint of the admissible weight interval; infinite
    wherever either endpoint is."""
    ends = _finite_interval(design, a, b)
    if ends is None:
        return math.inf
    return 0.5 * (ends[0] + ends[1])


def sqrt_mean_r(design: DirectDesign, a: float, b: float) -> float:
    """Geometric mean of the admissible weight interval; infinite wherever
    either endpoint is."""
    ends = _finite_interval(design, a, b)
    if ends is None:
        return math.inf
    return math.sqrt(ends[0] * ends[1])


def weight_for(design: DirectDesign, a: float, b: float) -> float:
    """Input weight selected by the design's rule, validated against the
    admissible interval."""
    if not in_admissible_set(a, b):
        raise InfeasibleError(f"no admissible positive input at (a, b) = ({a}, {b})")
    rule = design.r_rule
    if callable(rule):
        lo, hi = admissible_r_interval(design, a, b)
        if math.isinf(lo):
            return math.inf
        r = float(rule(a, b))
        if not (lo < r < hi):
            raise ConstraintError(
                f"custom weight {r} falls outside the admissible interval "
                f"({lo}, {hi}) at (a, b) = ({a}, {b})"
            )
        return r
    if rule == "midpoint":
        return midpoint_r(design, a, b)
    if rule == "sqrt-mean":
        return sqrt_mean_r(design, a, b)
    raise DomainError(f"unknown weight rule {rule!r}; use 'midpoint' or 'sqrt-mean'")


def direct_feedback(design: DirectDesign, a: float, b: float) -> tuple[float, float]:
    """Shifted input of the design and its contracted companion.

    Returns (omega_star, omega_nominal): the optimal input for the selected
    weight, and the contracted input it redesigns.
    """
    r = weight_for(design, a, b)
    if math.isinf(r):
        return (1.0, 1.0)
    omega_star = design.penalty.prime_inverse(-b / r)
    return omega_star, design.contractor.eval(omega_star)


def q_direct(design: DirectDesign, a: float, b: float) -> float:
    """Running state cost of the design; positive on the admissible set away
    from the equilibrium pair."""
    r = weight_for(design, a, b)
    if math.isinf(r):
        return -a
    _, omega0 = direct_feedback(design, a, b)
    return -a + b * (1.0 - omega0)


def pricing_residuals(design: DirectDesign, a: float, b: float) -> tuple[float, float]:
    """Residuals of the two exact identities tying the design together.

    First: the priced penalty at the optimal input equals the input-rate
    gap to its contracted companion, r psi(w*) + b (w* - w0) = 0. Second:
    the full pointwise balance a + b (w* - 1) + r psi(w*) + q = 0.
    """
    r = weight_for(design, a, b)
    if math.isinf(r):
        return (0.0, a + q_direct(design, a, b))
    omega_star, omega0 = direct_feedback(design, a, b)
    priced = r * design.penalty.eval(omega_star)
    res_slope = priced + b * (omega_star - omega0)
    res_hjb = a + b * (omega_star - 1.0) + priced + q_direct(design, a, b)
    return (res_slope, res_hjb)


def continuous_feedback(
    design: DirectDesign, lf: float, lg: float, equilibrium_input: float = 1.0
) -> tuple[float, float]:
    """Continuous selection of the direct design from raw Lyapunov rates.

    Uses the midpoint weight on the active branch (b < 0 with a > 0) and
    rests at the equilibrium input elsewhere; continuous across the branch
    boundary because the active input tends to 1 there. Returns
    (omega_star, omega_nominal) in shifted form.
    """
    a = lf + lg * equilibrium_input
    b = lg
    if not in_admissible_set(a, b):
        raise InfeasibleError(f"no admissible positive input at (a, b) = ({a}, {b})")
    if b < 0.0 and a > 0.0:
        zeta = design.bridge.slope_for_ratio(1.0 - a / b)
        omega_star = design.penalty.prime_inverse(2.0 * zeta / (1.0 + zeta))
        return omega_star, design.contractor.eval(omega_star)
    return (1.0, 1.0)


def volterra_direct(a: float, b: float, r: float) -> tuple[float, float, float]:
    """Closed-form direct design for the volterra penalty at explicit weight r.

    Returns (omega_star, omega_nominal, q). Raises ConstraintError naming the
    violated inequality when the weight cannot stabilize the pair: the input
    positivity margin requires r > -b, and the state cost positivity requires
    r ln(r / (r + b)) > a - b.
    """
    if not (r > 0.0):
        raise DomainError(f"input weight must be positive, got {r}")
    if a == 0.0 and b == 0.0:
        return (1.0, 1.0, 0.0)
    if r <= -b:
        raise ConstraintError(
            f"input-positivity inequality violated: requires r > -b, got r = {r}, "
            f"-b = {-b}"
        )
    t = b / r
    log_term = -math.log1p(t)  # == ln(r / (r + b))
    if not (r * log_term > a - b):
        raise ConstraintError(
            "state-cost-positivity inequality violated: requires "
            f"r ln(r/(r+b)) > a - b, got {r * log_term} <= {a - b}"
        )
    omega_star = r / (r + b)
    omega0 = 1.0 if t == 0.0 else math.log1p(t) / t
    q = -a + b + r * log_term
    return (omega_star, omega0, q)
