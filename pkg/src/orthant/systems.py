"""Control-affine system models, Lyapunov pairings, and a named registry.

A system is  d(state)/dt = drift(state) + input_field(state) * u  with a
scalar input u. Systems flagged ``positive_domain`` evolve on the open
positive orthant with strictly positive input and equilibrium input 1;
Euclidean systems use equilibrium input 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import DomainError
from .reporting import CheckReport

__all__ = [
    "ControlAffineSystem",
    "ControlLyapunov",
    "LiePair",
    "lie_pair",
    "check_clf_weak",
    "check_clf_strong",
    "log_grid",
    "register_system",
    "get_system",
    "available_systems",
]

State = tuple[float, ...]
VectorFn = Callable[[State], State]


@dataclass(frozen=True)
class ControlAffineSystem:
    """Control-affine dynamics with a scalar input channel."""

    name: str
    dim: int
    drift: VectorFn
    input_field: VectorFn
    equilibrium: State
    equilibrium_input: float
    positive_domain: bool = True

    def __post_init__(self) -> None:
        if len(self.equilibrium) != self.dim:
            raise ValueError(
                f"equilibrium has {len(self.equilibrium)} components, expected {self.dim}"
            )
        f = self.drift(self.equilibrium)
        g = self.input_field(self.equilibrium)
        resid = max(
            abs(fi + gi * self.equilibrium_input) for fi, gi in zip(f, g)
        )
        if resid > 1e-12:
            raise ValueError(
                f"equilibrium residual {resid:.3e} exceeds 1e-12 for system "
                f"{self.name!r}: drift + input_field * equilibrium_input must "
                "vanish at the equilibrium"
            )

    def velocity(self, state: State, u: float) -> State:
        f = self.drift(state)
        g = self.input_field(state)
        return tuple(fi + gi * u for fi, gi in zip(f, g))

    def in_domain(self, state: State) -> bool:
        if len(state) != self.dim:
            return False
        if not all(math.isfinite(x) for x in state):
            return False
        if self.positive_domain:
            return all(x > 0.0 for x in state)
        return True


@dataclass(frozen=True)
class ControlLyapunov:
    """Candidate Lyapunov function with an explicit gradient."""

    value: Callable[[State], float]
    gradient: Callable[[State], State]

    def check_gradient(
        self, points: Iterable[State], *, rel_tol: float = 1e-5
    ) -> CheckReport:
        """Compare the declared gradient against central differences."""
        report = CheckReport("lyapunov-gradient")
        worst = 0.0
        worst_at: State | None = None
        for pt in points:
            grad = self.gradient(pt)
            for i in range(len(pt)):
                h = 1e-6 * max(1.0, abs(pt[i]))
                hi = list(pt)
                lo = list(pt)
                hi[i] += h
                lo[i] -= h
                est = (self.value(tuple(hi)) - self.value(tuple(lo))) / (2.0 * h)
                err = abs(est - grad[i]) / max(1.0, abs(grad[i]))
                if err > worst:
                    worst, worst_at = err, pt
        report.add(
            "matches-central-difference",
            worst <= rel_tol,
            f"worst relative deviation {worst:.3e}"
            + (f" at {worst_at}" if worst_at else ""),
        )
        return report


@dataclass(frozen=True)
class LiePair:
    """Directional derivatives of a Lyapunov function along one system.

    ``lf`` and ``lg`` are the derivatives along drift and input field;
    ``a`` and ``b`` shift the input so the equilibrium input maps to zero:
    a = lf + lg * equilibrium_input, b = lg. The Lyapunov rate under input u
    is then a + b * (u - equilibrium_input).
    """

    lf: float
    lg: float
    a: float
    b: float


def lie_pair(system: ControlAffineSystem, clf: ControlLyapunov, state: State) -> LiePair:
    if not system.in_domain(state):
        raise DomainError(f"state {state} is outside the domain of {system.name!r}")
    grad = clf.gradient(state)
    f = system.drift(state)
    g = system.input_field(state)
    lf = sum(gi * fi for gi, fi in zip(grad, f))
    lg = sum(gi * hi for gi, hi in zip(grad, g))
    return LiePair(lf=lf, lg=lg, a=lf + lg * system.equilibrium_input, b=lg)


def log_grid(
    lo: float = 0.2,
    hi: float = 5.0,
    n: int = 64,
    dim: int = 2,
    *,
    exclude_equilibrium: State | None = None,
    tol: float = 1e-12,
) -> list[State]:
    """Log-uniform tensor grid over [lo, hi]^dim as a list of state tuples."""
    if not (0.0 < lo < hi):
        raise DomainError(f"grid bounds must satisfy 0 < lo < hi, got ({lo}, {hi})")
    axis = np.geomspace(lo, hi, n)
    mesh = np.meshgrid(*([axis] * dim), indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=-1)
    states = [tuple(float(x) for x in row) for row in pts]
    if exclude_equilibrium is not None:
        states = [
            s
            for s in states
            if max(abs(x - e) for x, e in zip(s, exclude_equilibrium)) > tol
        ]
    return states


def check_clf_weak(
    system: ControlAffineSystem, clf: ControlLyapunov, grid: Iterable[State]
) -> CheckReport:
    """A weak control-Lyapunov certificate on a grid.

    Wherever the raw input rate lg is nonnegative, the drift rate lf must be
    strictly negative, so that small positive inputs still decrease the
    Lyapunov function. The grid must exclude the equilibrium state.
    """
    report = CheckReport(f"weak-clf[{system.name}]")
    bad: list[State] = []
    for s in grid:
        pair = lie_pair(system, clf, s)
        if pair.lg >= 0.0 and not pair.lf < 0.0:
            bad.append(s)
    report.add(
        "drift-decreases-where-channel-pushes-up",
        not bad,
        "lf < 0 wherever lg >= 0"
        if not bad
        else f"{len(bad)} states violate the condition, e.g. {bad[:3]}",
    )
    return report


def check_clf_strong(
    system: ControlAffineSystem, clf: ControlLyapunov, grid: Iterable[State]
) -> CheckReport:
    """A strict decrease certificate on a grid, in shifted rates.

    Wherever the shifted drift rate a is nonnegative, the input rate b must
    be strictly negative; this is the admissibility condition of the
    inverse-optimal formulas. The grid must exclude the equilibrium state.
    """
    report = CheckReport(f"strong-clf[{system.name}]")
    bad: list[State] = []
    for s in grid:
        pair = lie_pair(system, clf, s)
        if pair.a >= 0.0 and not pair.b < 0.0:
            bad.append(s)
    report.add(
        "channel-pulls-down-where-drift-pushes-up",
        not bad,
        "b < 0 wherever a >= 0"
        if not bad
        else f"{len(bad)} states violate the condition, e.g. {bad[:3]}",
    )
    return report


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------

_REGISTRY: dict[str, tuple[ControlAffineSystem, ControlLyapunov]] = {}


def register_system(
    name: str,
    system: ControlAffineSystem,
    clf: ControlLyapunov,
    *,
    replace: bool = False,
) -> None:
    if name in _REGISTRY and not replace:
        raise ValueError(f"system {name!r} is already registered")
    _REGISTRY[name] = (system, clf)


def _ensure_builtins() -> None:
    if "scalar-x2" not in _REGISTRY:
        register_system("scalar-x2", *_scalar_x2())
    if "predator-prey" not in _REGISTRY:
        from . import predprey

        register_system("predator-prey", predprey.system(), predprey.lyapunov())


def get_system(name: str) -> tuple[ControlAffineSystem, ControlLyapunov]:
    _ensure_builtins()
    try:
        return _REGISTRY[name]
    except KeyError:
        raise KeyError(
            f"unknown system {name!r}; registered systems: {available_systems()}"
        ) from None


def available_systems() -> list[str]:
    _ensure_builtins()
    return sorted(_REGISTRY)


def _scalar_x2() -> tuple[ControlAffineSystem, ControlLyapunov]:
    """One-dimensional benchmark dx/dt = x^2 - u on the whole real line."""
    sys = ControlAffineSystem(
        name="scalar-x2",
        dim=1,
        drift=lambda s: (s[0] * s[0],),
        input_field=lambda s: (-1.0,),
        equilibrium=(0.0,),
        equilibrium_input=0.0,
        positive_domain=False,
    )
    clf = ControlLyapunov(
        value=lambda s: 0.5 * s[0] * s[0],
        gradient=lambda s: (s[0],),
    )
    return sys, clf
