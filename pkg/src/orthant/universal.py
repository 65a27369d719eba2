"""Universal pointwise stabilizing formulas for a positive scalar input.

Both formulas take the Lyapunov rates of the current state and return an
input in shifted form: the value 1 means "hold the equilibrium input". The
basic formula damps with the raw rates (lf, lg); the inverse-optimal variant
works with the shifted pair a = lf + lg * u_eq, b = lg, is continuous, keeps
the input strictly positive, and prices its action as an optimal design.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InfeasibleError
from .systems import State

__all__ = [
    "UniversalEval",
    "universal_basic",
    "universal_invopt",
    "half_universal",
    "predprey_universal",
    "scalar_example_feedback",
    "scalar_example_costs",
]


@dataclass(frozen=True)
class UniversalEval:
    """One pointwise evaluation of a universal formula.

    ``omega`` is the input in shifted form (equilibrium value 1), ``vdot``
    the resulting Lyapunov rate, ``r`` the input weight of the priced
    design (infinite where the formula rests at the equilibrium input), and
    ``q_run`` the running state cost, or None for the unpriced basic formula.
    """

    omega: float
    vdot: float
    r: float
    q_run: float | None = None


def universal_basic(lf: float, lg: float) -> UniversalEval:
    """Damping formula on the raw Lyapunov rates.

    Feasible wherever some positive input decreases the Lyapunov function:
    lf < 0 or lg != 0, plus the equilibrium point lf = lg = 0. The returned
    input is strictly positive and the rate strictly negative away from the
    equilibrium point.
    """
    if lf == 0.0 and lg == 0.0:
        return UniversalEval(omega=1.0, vdot=0.0, r=0.0, q_run=None)
    if lf >= 0.0 and lg >= 0.0:
        raise InfeasibleError(
            f"no decreasing positive input exists at (lf, lg) = ({lf}, {lg})"
        )
    h = math.hypot(lf, lg)
    if lf > 0.0:
        # h - lf cancels when |lg| << lf; rationalize (feasibility gives lg < 0)
        omega = 1.0 - (h + lf) / lg
        gain = lg * lg / (h + lf)
        vdot = lg - h
    elif lg > 0.0:
        # here 1 - lg / gain cancels when |lf| << lg; h - lg = lf^2 / (h + lg)
        # exactly, which keeps the input strictly positive and the rate
        # strictly negative down to underflow
        gain = h - lf
        drop = lf * lf / (h + lg)
        omega = (drop - lf) / gain
        vdot = -drop
    else:
        gain = h - lf
        omega = 1.0 - lg / gain
        vdot = lg - h
    return UniversalEval(omega=omega, vdot=vdot, r=gain, q_run=None)


def universal_invopt(a: float, b: float) -> UniversalEval:
    """Inverse-optimal formula on the shifted Lyapunov rates.

    Admissible where b < 0, or b >= 0 with a < 0, or at the origin. On the
    inactive branch (b >= 0) the formula holds the equilibrium input and
    coasts on the drift; on the active branch it damps to rate -hypot(a, b)
    and doubles as the optimal design for the weight r = q_run it reports.
    """
    if b >= 0.0:
        if a >= 0.0 and not (a == 0.0 and b == 0.0):
            raise InfeasibleError(
                f"no admissible positive input at (a, b) = ({a}, {b})"
            )
        return UniversalEval(omega=1.0, vdot=a, r=math.inf, q_run=-a)
    h = math.hypot(a, b)
    # two algebraically equal forms, each stable on its sign of a
    kappa = (a + h) / b if a > 0.0 else b / (h - a)
    q = (b * b) / (a + h) if a > 0.0 else h - a
    return UniversalEval(omega=1.0 - kappa, vdot=-h, r=q, q_run=q)


def half_universal(a: float, b: float) -> float:
    """Input halfway between the equilibrium input and the inverse-optimal
    formula, in shifted form; stabilizing whenever the full formula is."""
    full = universal_invopt(a, b).omega
    return 1.0 + 0.5 * (full - 1.0)


def predprey_universal(state: State) -> float:
    """Basic universal input for the predator-prey benchmark, as the physical
    harvesting level."""
    from .predprey import lie_LG

    lvalue, gvalue = lie_LG(state)
    return universal_basic(lvalue, gvalue).omega


def scalar_example_feedback(x: float) -> float:
    """Closed-form inverse-optimal input for dx/dt = x^2 - u.

    Zero for x <= 0 (the drift already points home), x^2 + sqrt(x^4 + 1)
    for x > 0; discontinuous at the origin by design.
    """
    if x <= 0.0:
        return 0.0
    x2 = x * x
    return x2 + math.hypot(x2, 1.0)


def scalar_example_costs(x: float) -> UniversalEval:
    """Pointwise design data for dx/dt = x^2 - u via the inverse-optimal
    formula; the physical input is omega - 1 here."""
    return universal_invopt(x**3, -x)
