"""Predator-prey benchmark on the open positive quadrant.

Prey X and predator Y follow  dX/dt = (1 - Y) X,  dY/dt = (X - U) Y  with a
strictly positive harvesting input U acting on the predator. The coexistence
equilibrium is (1, 1) at U = 1. The classical pairwise Lyapunov function
built from the deviation measure s - 1 - ln s certifies stabilizing designs
and prices the input through the volterra penalty.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError
from .shaping import Expander, Penalty, _psi_volterra, contractor
from .systems import ControlAffineSystem, ControlLyapunov

__all__ = [
    "deviation",
    "dynamics",
    "clf",
    "lie_LG",
    "q_state_cost",
    "nominal_feedback",
    "optimal_feedback",
    "volterra_weight_factor",
    "VolterraWeight",
    "r_weight",
    "s_plus_membership",
    "fl_diagnostics",
    "z_curves",
    "penalty_sensitivity",
    "hamiltonian",
    "system",
    "lyapunov",
    "scaled_input_system",
    "nominal_ratio",
]

State = tuple[float, float]

_SQRT5 = math.sqrt(5.0)


def _check_state(state: State) -> tuple[float, float]:
    x, y = state
    if not (x > 0.0 and y > 0.0):
        raise DomainError(f"state must lie in the open positive quadrant, got {state}")
    return float(x), float(y)


def deviation(s: float) -> float:
    """s - 1 - ln s: nonnegative, zero only at s = 1."""
    if not (s > 0.0):
        raise DomainError(f"deviation argument must be positive, got {s}")
    return _psi_volterra(s)


def dynamics(state: State, u: float) -> State:
    """Velocity of the harvested predator-prey system under input u > 0."""
    x, y = _check_state(state)
    if not (u > 0.0):
        raise DomainError(f"input must be strictly positive, got {u}")
    return ((1.0 - y) * x, (x - u) * y)


def clf(state: State) -> tuple[float, State]:
    """Lyapunov value and gradient at a state.

    V = deviation(1/X) + deviation(Y/X); the value is positive away from
    (1, 1), zero there, and proper on the open quadrant.
    """
    x, y = _check_state(state)
    value = _psi_volterra(1.0 / x) + _psi_volterra(y / x)
    gx = (2.0 * x - 1.0 - y) / (x * x)
    gy = (y - x) / (x * y)
    return value, (gx, gy)


def lie_LG(state: State) -> tuple[float, float]:
    """Lyapunov rates along drift (L) and along the input channel scaled by
    the input (G), so that dV/dt = L + G * U."""
    x, y = _check_state(state)
    d = x - 1.0
    lvalue = (-(d * d) + y * (y - x)) / x
    gvalue = (x - y) / x
    return lvalue, gvalue


def q_state_cost(state: State) -> float:
    """State cost of the inverse-optimal volterra design; positive away from
    (1, 1) and exactly the decrease rate delivered by the nominal input."""
    x, y = _check_state(state)
    d = x - 1.0
    e = y - x
    return d * d / x + (e * e / x) * (y / x)


def nominal_feedback(state: State) -> float:
    """Benchmark input Y^2 / X: stabilizing, not optimal."""
    x, y = _check_state(state)
    return y * y / x


def optimal_feedback(state: State, expander: Expander | None = None) -> float:
    """Inverse-optimal input Y * expand(Y / X); volterra expander by default."""
    x, y = _check_state(state)
    if expander is None:
        expander = _volterra_expander()
    return y * expander.eval(y / x)


_VOLTERRA_EXPANDER: Expander | None = None


def _volterra_expander() -> Expander:
    global _VOLTERRA_EXPANDER
    if _VOLTERRA_EXPANDER is None:
        _VOLTERRA_EXPANDER = Expander(contractor("volterra"))
    return _VOLTERRA_EXPANDER


def volterra_weight_factor(rho: float) -> float:
    """Factor (rho - 1) * expand(rho) / (expand(rho) - 1) of the input weight.

    Continuous through rho = 1 with value 1/2 there; a short series bridges
    the removable singularity.
    """
    if not (rho > 0.0):
        raise DomainError(f"ratio must be positive, got {rho}")
    w = rho - 1.0
    if abs(w) < 1e-6:
        return 0.5 + w * (2.0 / 3.0 + w * (1.0 / 9.0))
    sig = _volterra_expander().eval(rho)
    return w * sig / (sig - 1.0)


@dataclass(frozen=True)
class VolterraWeight:
    """Input weight of the volterra design at a fixed predator/prey ratio."""

    rho: float

    @property
    def factor(self) -> float:
        return volterra_weight_factor(self.rho)

    def weight(self, predator: float) -> float:
        if not (predator > 0.0):
            raise DomainError(f"predator level must be positive, got {predator}")
        return predator * self.factor


def r_weight(
    state: State,
    penalty: Penalty | None = None,
    expander: Expander | None = None,
) -> float:
    """Input weight of the inverse-optimal design at a state.

    With the default volterra shaping this is Y * factor(Y/X); for a general
    penalty it is Y * (rho - 1) / penalty'(expand(rho)) with the removable
    singularity at rho = 1 filled by the curvature limit.
    """
    x, y = _check_state(state)
    rho = y / x
    if penalty is None:
        return y * volterra_weight_factor(rho)
    if expander is None:
        expander = Expander(penalty.contractor)
    if abs(rho - 1.0) < 1e-6:
        curvature = penalty.second_derivative_at_one
        if curvature == 0.0:
            return math.inf
        if math.isinf(curvature):
            return 0.0
        slope_of_expand = 1.0 / penalty.contractor.derivative_at_one
        return y / (curvature * slope_of_expand)
    return y * (rho - 1.0) / penalty.prime(expander.eval(rho))


def s_plus_membership(state: State) -> bool:
    """Whether a state lies in the open lens where no strictly decreasing
    input direction exists (both rates push upward)."""
    x, y = _check_state(state)
    if not (0.0 < y < 1.0):
        return False
    half_width = _SQRT5 * (1.0 - y) / 2.0
    center = (3.0 - y) / 2.0
    return center - half_width < x < center + half_width


def fl_diagnostics(
    state: State, k1: float = 2.0, k2: float = 3.0
) -> tuple[bool, bool]:
    """Two defects of the benchmark feedback-linearizing design at a start.

    Returns (control_negative, excursion): whether the linearizing input is
    negative at the state, and whether the closed loop started there dips
    below one fifth of the prey equilibrium before settling. The excursion
    bound is calibrated for gains (2, 3) only.
    """
    x, y = _check_state(state)
    control_negative = y < 1.0 + (k1 * math.log(x) - x) / (k2 + x)
    if (k1, k2) != (2.0, 3.0):
        raise ValueError("the excursion test is only calibrated for gains (2, 3)")
    lx = math.log(x)
    disc = (y - 1.0 - 2.0 * lx) ** 2 >= 8.0 * (y - 1.0 - lx)
    if x <= 1.0:
        overshoot_side = y > 1.0 + (2.0 / 3.0) * lx
    else:
        overshoot_side = y > 1.0 + 2.0 * lx
    excursion = disc and overshoot_side
    return control_negative, excursion


def z_curves(z: float) -> tuple[float, float]:
    """Input ratios of the two designs along the line Y = (1 + z) X.

    Returns (nominal_ratio, optimal_ratio): nominal and inverse-optimal input
    divided by the linearizing input, as functions of the offset z > -1.
    """
    if not (z > -1.0):
        raise DomainError(f"offset must exceed -1, got {z}")
    if z == 0.0:
        return 1.0, 1.0
    return math.log1p(z) / z, 1.0 / (1.0 + z)


def penalty_sensitivity(state: State, u: float) -> float:
    """Derivative of the input-penalty term of the running cost with respect
    to the input, at a state and input level u > 0."""
    x, y = _check_state(state)
    if not (u > 0.0):
        raise DomainError(f"input must be strictly positive, got {u}")
    return volterra_weight_factor(y / x) * (1.0 - y / u)


def hamiltonian(
    state: State,
    penalty: Penalty | None = None,
    expander: Expander | None = None,
) -> Callable[[float | np.ndarray], float | np.ndarray]:
    """Pointwise running-cost-plus-rate map of the inverse-optimal design.

    The returned closure evaluates  q + L + G Y w + r * penalty(w)  over the
    input ratio w = U / Y; it vanishes exactly at the optimal ratio and is
    positive elsewhere. Accepts scalars or arrays.
    """
    from .shaping import penalty_from_contractor

    x, y = _check_state(state)
    if penalty is None:
        penalty = penalty_from_contractor(contractor("volterra"))
    lvalue, gvalue = lie_LG(state)
    q = q_state_cost(state)
    r = r_weight(state, penalty, expander)
    gy = gvalue * y

    def point_eval(w):
        if isinstance(w, np.ndarray):
            return q + lvalue + gy * w + r * penalty.eval_many(w)
        return q + lvalue + gy * w + r * penalty.eval(w)

    return point_eval


def nominal_ratio(state: State) -> float:
    """Input ratio U / Y of the scaled-input view of the nominal design."""
    x, y = _check_state(state)
    return y / x


# ---------------------------------------------------------------------------
# system builders
# ---------------------------------------------------------------------------


def system() -> ControlAffineSystem:
    return ControlAffineSystem(
        name="predator-prey",
        dim=2,
        drift=lambda s: ((1.0 - s[1]) * s[0], s[0] * s[1]),
        input_field=lambda s: (0.0, -s[1]),
        equilibrium=(1.0, 1.0),
        equilibrium_input=1.0,
        positive_domain=True,
    )


def lyapunov() -> ControlLyapunov:
    return ControlLyapunov(
        value=lambda s: clf(s)[0],
        gradient=lambda s: clf(s)[1],
    )


def scaled_input_system() -> ControlAffineSystem:
    """The same dynamics with the input ratio w = U / Y as the input channel,
    so the input field is (0, -Y^2) and the equilibrium input stays 1."""
    return ControlAffineSystem(
        name="predator-prey-scaled-input",
        dim=2,
        drift=lambda s: ((1.0 - s[1]) * s[0], s[0] * s[1]),
        input_field=lambda s: (0.0, -s[1] * s[1]),
        equilibrium=(1.0, 1.0),
        equilibrium_input=1.0,
        positive_domain=True,
    )
