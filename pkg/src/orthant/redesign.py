"""Turning a stabilizing input into an inverse-optimal one by expansion.

Given a nominal input in shifted form (equilibrium value 1), feeding its
expanded value back instead keeps the Lyapunov rate at least as negative and
makes the loop optimal for a running cost built from the induced penalty,
with state weight equal to the decrease rate already delivered by the
nominal input. The one structural requirement is sign alignment: wherever
the input channel is live, the expanded nominal must deviate from 1 against
the sign of the input rate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Protocol

from .errors import DomainError
from .numerics import adaptive_simpson
from .reporting import CheckReport
from .shaping import Expander, Penalty, custom_contractor, penalty_from_contractor
from .systems import ControlAffineSystem, ControlLyapunov, State, lie_pair

__all__ = [
    "ExpanderLike",
    "LinearDeviationExpander",
    "RedesignProblem",
    "predprey_redesign",
    "alignment_at",
    "check_sign_alignment",
    "check_alignment_on_pairs",
    "redesigned_feedback",
    "redesign_weight_r",
    "penalty_product",
    "penalty_product_check",
]


class ExpanderLike(Protocol):
    def eval(self, s: float) -> float: ...


@dataclass(frozen=True)
class LinearDeviationExpander:
    """Expander that scales the deviation from 1 by a constant gain > 1.

    Its inverse is a contraction with slope 1/gain at the fixed point, so the
    induced penalty is the power |s - 1|**(gain/(gain - 1)) up to scale.
    """

    gain: float = 2.0

    def __post_init__(self) -> None:
        if not self.gain > 1.0:
            raise DomainError(f"expander gain must exceed 1, got {self.gain}")

    def eval(self, s: float) -> float:
        if not (s > 0.0):
            raise DomainError(f"expander argument must be positive, got {s}")
        out = 1.0 + self.gain * (s - 1.0)
        if out <= 0.0:
            raise DomainError(
                f"ratio {s} is below the reach 1 - 1/gain of this expander"
            )
        return out

    def inverse(self, w: float) -> float:
        return 1.0 + (w - 1.0) / self.gain

    def slope_at_one(self) -> float:
        return self.gain


def _expander_inverse(exp: ExpanderLike, w: float) -> float:
    inv = getattr(exp, "inverse", None)
    if inv is not None:
        return inv(w)
    return exp.contractor.eval(w)  # type: ignore[attr-defined]


def _expander_slope_at_one(exp: ExpanderLike) -> float:
    fn = getattr(exp, "slope_at_one", None)
    if fn is not None:
        return fn()
    return 1.0 / exp.contractor.derivative_at_one  # type: ignore[attr-defined]


def _expander_derivative(exp: ExpanderLike, s: float) -> float:
    if isinstance(exp, LinearDeviationExpander):
        return exp.gain
    h = 1e-6 * s
    return (exp.eval(s + h) - exp.eval(s - h)) / (2.0 * h)


@dataclass(frozen=True)
class RedesignProblem:
    """A system, its Lyapunov function, a shifted-form nominal input, and the
    expander (with induced penalty) used to redesign it."""

    system: ControlAffineSystem
    clf: ControlLyapunov
    nominal: Callable[[State], float]
    expander: ExpanderLike
    penalty: Penalty | None = None

    def __post_init__(self) -> None:
        at_eq = self.nominal(self.system.equilibrium)
        if abs(at_eq - 1.0) > 1e-12:
            raise ValueError(
                f"nominal input must equal 1 at the equilibrium, got {at_eq!r}"
            )

    def effective_penalty(self) -> Penalty:
        if self.penalty is not None:
            return self.penalty
        contr = getattr(self.expander, "contractor", None)
        if contr is not None:
            return penalty_from_contractor(contr)
        slope = 1.0 / _expander_slope_at_one(self.expander)
        inverse = lambda w: _expander_inverse(self.expander, w)
        return penalty_from_contractor(
            custom_contractor(inverse, derivative_at_one=slope)
        )


def predprey_redesign(
    expander: ExpanderLike | None = None, penalty: Penalty | None = None
) -> RedesignProblem:
    """The predator-prey benchmark in scaled-input form with its ratio
    nominal input Y/X, ready for redesign."""
    from . import predprey
    from .shaping import contractor

    if expander is None:
        expander = Expander(contractor("volterra"))
    return RedesignProblem(
        system=predprey.scaled_input_system(),
        clf=predprey.lyapunov(),
        nominal=lambda s: predprey.nominal_ratio(s),
        expander=expander,
        penalty=penalty,
    )


# ---------------------------------------------------------------------------
# alignment
# ---------------------------------------------------------------------------


def alignment_at(b: float, expanded_nominal: float) -> str:
    """Classify one state: 'aligned', 'deactivated', or 'misaligned'.

    Aligned means the expanded nominal deviates from 1 against the sign of
    the input rate b (or the channel is dead); deactivated means the channel
    is live but the nominal rests exactly at the equilibrium input.
    """
    dev = expanded_nominal - 1.0
    if b == 0.0:
        return "aligned"
    if dev == 0.0:
        return "deactivated"
    return "aligned" if (dev > 0.0) != (b > 0.0) else "misaligned"


def check_sign_alignment(
    problem: RedesignProblem,
    grid: Iterable[State],
    *,
    deactivated_ok: bool = False,
) -> CheckReport:
    """Verify the alignment requirement of the redesign on a state grid.

    Misaligned states always fail. Deactivated states fail unless
    ``deactivated_ok`` is set and the drift alone still decreases the
    Lyapunov function there (positive nominal decrease rate).
    """
    report = CheckReport(f"sign-alignment[{problem.system.name}]")
    misaligned: list[State] = []
    deactivated: list[State] = []
    unjustified: list[State] = []
    n = 0
    for s in grid:
        n += 1
        pair = lie_pair(problem.system, problem.clf, s)
        omega0 = problem.nominal(s)
        status = alignment_at(pair.lg, problem.expander.eval(omega0))
        if status == "misaligned":
            misaligned.append(s)
        elif status == "deactivated":
            deactivated.append(s)
            if -(pair.lf + pair.lg * omega0) <= 0.0:
                unjustified.append(s)
    report.add(
        "expansion-opposes-input-rate",
        not misaligned,
        f"{n} states checked"
        if not misaligned
        else f"{len(misaligned)} misaligned states, e.g. {misaligned[:3]}",
    )
    if deactivated:
        if deactivated_ok:
            report.add(
                "deactivated-states-still-decrease",
                not unjustified,
                f"{len(deactivated)} states rest at the equilibrium input"
                + ("" if not unjustified else f"; {len(unjustified)} do not decrease"),
            )
        else:
            report.add(
                "no-deactivated-states",
                False,
                f"{len(deactivated)} states rest at the equilibrium input with a "
                f"live channel, e.g. {deactivated[:3]}",
            )
    return report


def check_alignment_on_pairs(
    pairs: Iterable[tuple[float, float]],
    nominal: Callable[[float, float], float],
    expander: ExpanderLike,
    *,
    deactivated_ok: bool = True,
) -> CheckReport:
    """Alignment check over abstract shifted rate pairs (a, b) instead of
    states; the nominal map gives the shifted input at each pair."""
    report = CheckReport("sign-alignment[rate-pairs]")
    misaligned: list[tuple[float, float]] = []
    unjustified: list[tuple[float, float]] = []
    n = 0
    for a, b in pairs:
        n += 1
        omega0 = nominal(a, b)
        status = alignment_at(b, expander.eval(omega0))
        if status == "misaligned":
            misaligned.append((a, b))
        elif status == "deactivated":
            if not deactivated_ok or a + b * (omega0 - 1.0) >= 0.0:
                unjustified.append((a, b))
    report.add(
        "expansion-opposes-input-rate",
        not misaligned,
        f"{n} pairs checked"
        if not misaligned
        else f"{len(misaligned)} misaligned pairs, e.g. {misaligned[:3]}",
    )
    report.add(
        "rests-only-where-decreasing",
        not unjustified,
        "equilibrium-input rests are all justified"
        if not unjustified
        else f"{len(unjustified)} unjustified rests, e.g. {unjustified[:3]}",
    )
    return report


# ---------------------------------------------------------------------------
# the redesigned loop
# ---------------------------------------------------------------------------


def redesigned_feedback(problem: RedesignProblem, state: State) -> float:
    """Shifted-form input of the redesigned loop: the expanded nominal."""
    return problem.expander.eval(problem.nominal(state))


def redesign_weight_r(problem: RedesignProblem, state: State) -> float:
    """Input weight making the redesigned loop optimal at this state.

    Infinite where the input channel is dead or the nominal rests at the
    equilibrium input (no pricing needed there).
    """
    pair = lie_pair(problem.system, problem.clf, state)
    if pair.lg == 0.0:
        return math.inf
    omega_star = redesigned_feedback(problem, state)
    slope = problem.effective_penalty().prime(omega_star)
    if slope == 0.0:
        return math.inf
    return -pair.lg / slope


def penalty_product(
    problem: RedesignProblem,
    state: State,
    omega: float,
    *,
    route: str = "direct",
) -> float:
    """The priced input term r(state) * penalty(omega) of the running cost.

    ``route="direct"`` multiplies the weight by the penalty value;
    ``route="integral"`` rebuilds the same quantity from the expander alone,
    by integrating its logarithmic growth rate from the nominal input to the
    contracted image of omega. The two agree to quadrature accuracy, which
    exercises the defining identity of the induced penalty.
    """
    if route == "direct":
        r = redesign_weight_r(problem, state)
        psi = problem.effective_penalty().eval(omega)
        if psi == 0.0:
            return 0.0
        return r * psi
    if route != "integral":
        raise DomainError(f"unknown route {route!r}; use 'direct' or 'integral'")

    if not (omega > 0.0):
        raise DomainError(f"input ratio must be positive, got {omega}")
    if omega == 1.0:
        return 0.0
    pair = lie_pair(problem.system, problem.clf, state)
    omega0 = problem.nominal(state)
    if omega0 == 1.0:
        raise DomainError(
            "integral route undefined where the nominal rests at the equilibrium input"
        )
    exp_map = problem.expander
    omega_star = exp_map.eval(omega0)
    prefactor = pair.lg * (omega0 - omega_star)
    sigma_end = _expander_inverse(exp_map, omega)

    p_local = 1.0 / (1.0 - 1.0 / _expander_slope_at_one(exp_map))

    def integrand(sigma: float) -> float:
        d = sigma - 1.0
        if abs(d) < 1e-6:
            return p_local / d
        return _expander_derivative(exp_map, sigma) / (exp_map.eval(sigma) - sigma)

    same_side = (omega0 - 1.0) * (sigma_end - 1.0) > 0.0
    if same_side:
        log_growth = adaptive_simpson(integrand, omega0, sigma_end, tol=1e-10)
    else:
        # split symmetrically around the singular point; the equalized local
        # coefficients of the penalty make the two divergences cancel
        delta = 1e-7
        near = 1.0 - delta if omega0 < 1.0 else 1.0 + delta
        far = 1.0 + delta if omega0 < 1.0 else 1.0 - delta
        log_growth = adaptive_simpson(integrand, omega0, near, tol=1e-10)
        log_growth += adaptive_simpson(integrand, far, sigma_end, tol=1e-10)
    return prefactor * math.exp(log_growth)


def penalty_product_check(
    problem: RedesignProblem, state: State, omega: float
) -> tuple[float, float]:
    """Both routes to r * penalty(omega): (direct, integral)."""
    return (
        penalty_product(problem, state, omega, route="direct"),
        penalty_product(problem, state, omega, route="integral"),
    )
