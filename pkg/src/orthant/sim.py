"""Closed-loop integration, cost accumulation, and deterministic output files.

Positive-domain systems integrate in logarithmic coordinates with a fixed-step
fourth-order Runge-Kutta rule, which keeps every stage state inside the open
orthant by construction; Euclidean systems integrate in their own coordinates.
Feedbacks receive the physical state and must return the physical input.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .errors import ContractViolationError, DivergenceError, DomainError
from .shaping import Penalty
from .systems import ControlAffineSystem, ControlLyapunov, State

__all__ = [
    "IntegratorOptions",
    "TrajectoryRecord",
    "CostSummary",
    "integrate",
    "accumulate_cost",
    "hjb_residual",
    "lyapunov_monotonicity",
    "write_trajectory_csv",
    "write_json",
]


@dataclass(frozen=True)
class IntegratorOptions:
    step: float = 1e-3
    horizon: float = 200.0
    stop_tolerance: float = 1e-8
    record_stride: int = 1


@dataclass(frozen=True)
class TrajectoryRecord:
    """Uniformly recorded closed-loop trajectory."""

    times: np.ndarray
    states: np.ndarray
    controls: np.ndarray
    clf_values: np.ndarray | None
    stopped_early: bool
    record_stride: int

    @property
    def final_state(self) -> State:
        return tuple(float(x) for x in self.states[-1])

    @property
    def final_time(self) -> float:
        return float(self.times[-1])


def integrate(
    system: ControlAffineSystem,
    feedback: Callable[[State], float],
    start: State,
    options: IntegratorOptions | None = None,
    clf: ControlLyapunov | None = None,
) -> TrajectoryRecord:
    """Run the closed loop from a start state until the horizon or until the
    state enters the stop ball around the equilibrium (sup-norm).

    Raises ContractViolationError if the feedback emits a non-positive input
    on a positive-domain system, and DivergenceError if the state leaves the
    domain or stops being finite.
    """
    opts = options or IntegratorOptions()
    if not (opts.step > 0.0 and opts.horizon > 0.0):
        raise DomainError("step and horizon must be positive")
    if opts.record_stride < 1:
        raise DomainError("record stride must be a positive integer")
    state = tuple(float(x) for x in start)
    if not system.in_domain(state):
        raise DomainError(f"start state {state} is outside the domain of {system.name!r}")

    h = opts.step
    n_steps = int(math.ceil(opts.horizon / h - 1e-9))
    eq = system.equilibrium
    positive = system.positive_domain

    def control(st: State) -> float:
        u = feedback(st)
        if positive and not (u > 0.0):
            raise ContractViolationError(
                f"feedback returned non-positive input {u!r} at state {st}"
            )
        return u

    def log_slope(st: State) -> list[float]:
        vel = system.velocity(st, control(st))
        return [v / x for v, x in zip(vel, st)]

    def advance(st: State) -> State:
        if positive:
            z = [math.log(x) for x in st]
            k1 = log_slope(st)
            k2 = log_slope(tuple(math.exp(zi + 0.5 * h * d) for zi, d in zip(z, k1)))
            k3 = log_slope(tuple(math.exp(zi + 0.5 * h * d) for zi, d in zip(z, k2)))
            k4 = log_slope(tuple(math.exp(zi + h * d) for zi, d in zip(z, k3)))
            return tuple(
                math.exp(zi + (h / 6.0) * (a + 2.0 * (b + c) + d))
                for zi, a, b, c, d in zip(z, k1, k2, k3, k4)
            )
        k1 = system.velocity(st, control(st))
        s2 = tuple(x + 0.5 * h * d for x, d in zip(st, k1))
        k2 = system.velocity(s2, control(s2))
        s3 = tuple(x + 0.5 * h * d for x, d in zip(st, k2))
        k3 = system.velocity(s3, control(s3))
        s4 = tuple(x + h * d for x, d in zip(st, k3))
        k4 = system.velocity(s4, control(s4))
        return tuple(
            x + (h / 6.0) * (a + 2.0 * (b + c) + d)
            for x, a, b, c, d in zip(st, k1, k2, k3, k4)
        )

    times = [0.0]
    states = [state]
    controls = [control(state)]
    stopped = False
    for k in range(1, n_steps + 1):
        nxt = advance(state)
        if not all(math.isfinite(x) for x in nxt) or not system.in_domain(nxt):
            raise DivergenceError(
                f"state left the domain near t = {k * h:.6g}: {nxt}"
            )
        state = nxt
        dev = max(abs(x - e) for x, e in zip(state, eq))
        if dev <= opts.stop_tolerance:
            stopped = True
        if stopped or k % opts.record_stride == 0 or k == n_steps:
            times.append(k * h)
            states.append(state)
            controls.append(control(state))
        if stopped:
            break

    clf_vals = (
        np.array([clf.value(s) for s in states]) if clf is not None else None
    )
    return TrajectoryRecord(
        times=np.array(times),
        states=np.array(states),
        controls=np.array(controls),
        clf_values=clf_vals,
        stopped_early=stopped,
        record_stride=opts.record_stride,
    )


@dataclass(frozen=True)
class CostSummary:
    """Accumulated running cost of a trajectory plus the truncation tail."""

    integral: float
    tail: float
    running: np.ndarray
    state_costs: np.ndarray
    input_costs: np.ndarray

    @property
    def total(self) -> float:
        return self.integral + self.tail


def _cumulative_composite(h: float, y: np.ndarray) -> np.ndarray:
    """Cumulative integral on a uniform grid: Simpson pairs with a trapezoid
    patch on the trailing odd interval."""
    out = np.empty_like(y)
    out[0] = 0.0
    for k in range(1, y.size):
        if k % 2 == 0:
            out[k] = out[k - 2] + h * (y[k - 2] + 4.0 * y[k - 1] + y[k]) / 3.0
        else:
            out[k] = out[k - 1] + 0.5 * h * (y[k - 1] + y[k])
    return out


def accumulate_cost(
    traj: TrajectoryRecord,
    q_fn: Callable[[State], float],
    weight_fn: Callable[[State], float],
    penalty: Penalty,
    ratio_fn: Callable[[State, float], float],
    value_fn: Callable[[State], float] | None = None,
) -> CostSummary:
    """Integrate q(state) + weight(state) * penalty(ratio) along a trajectory.

    The trajectory must be recorded at every step. ``ratio_fn`` maps (state,
    input) to the penalized input ratio. ``value_fn`` supplies the Lyapunov
    value used as the truncation tail at the final state; without it the tail
    is zero.
    """
    if traj.record_stride != 1:
        raise DomainError("cost accumulation requires a stride-1 trajectory record")
    n = traj.times.size
    if n < 2:
        raise DomainError("trajectory has fewer than two samples")
    h = float(traj.times[-1] - traj.times[0]) / (n - 1)
    state_costs = np.empty(n)
    input_costs = np.empty(n)
    for i in range(n):
        st = tuple(float(x) for x in traj.states[i])
        state_costs[i] = q_fn(st)
        pen = penalty.eval(ratio_fn(st, float(traj.controls[i])))
        if pen == 0.0:
            input_costs[i] = 0.0
        else:
            input_costs[i] = weight_fn(st) * pen
    running = _cumulative_composite(h, state_costs + input_costs)
    tail = float(value_fn(traj.final_state)) if value_fn is not None else 0.0
    return CostSummary(
        integral=float(running[-1]),
        tail=tail,
        running=running,
        state_costs=state_costs,
        input_costs=input_costs,
    )


def hjb_residual(
    point_eval: Callable[[np.ndarray], np.ndarray], omega_grid: np.ndarray
) -> tuple[float, float]:
    """Minimum of a pointwise cost-plus-rate map over an input-ratio grid.

    Returns (minimum value, minimizing ratio). The map may accept the whole
    grid at once; otherwise it is evaluated per point.
    """
    grid = np.asarray(omega_grid, dtype=float)
    if grid.size == 0:
        raise DomainError("input-ratio grid is empty")
    try:
        vals = np.asarray(point_eval(grid), dtype=float)
        if vals.shape != grid.shape:
            raise TypeError
    except TypeError:
        vals = np.array([float(point_eval(float(w))) for w in grid])
    idx = int(np.argmin(vals))
    return float(vals[idx]), float(grid[idx])


def lyapunov_monotonicity(traj: TrajectoryRecord) -> float:
    """Largest increase of the recorded Lyapunov value between consecutive
    samples; nonpositive means the recorded descent was monotone."""
    if traj.clf_values is None:
        raise DomainError("trajectory was recorded without Lyapunov values")
    diffs = np.diff(traj.clf_values)
    if diffs.size == 0:
        return 0.0
    return float(diffs.max())


# ---------------------------------------------------------------------------
# deterministic writers
# ---------------------------------------------------------------------------


def _atomic_write(path: str, text: str) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


def write_trajectory_csv(
    path: str,
    traj: TrajectoryRecord,
    cost: CostSummary | None = None,
    state_names: Iterable[str] | None = None,
) -> None:
    """Write a trajectory (and optional running cost) as a deterministic CSV:
    17-significant-digit values, '.' decimal separator, newline endings, and
    an atomic replace of the target file."""
    dim = traj.states.shape[1]
    names = list(state_names) if state_names is not None else [f"x{i + 1}" for i in range(dim)]
    if len(names) != dim:
        raise DomainError(f"expected {dim} state names, got {len(names)}")
    header = ["t", *names, "control"]
    has_v = traj.clf_values is not None
    if has_v:
        header.append("V")
    if cost is not None:
        header += ["q", "rPsi", "J"]
    lines = [",".join(header)]
    for i in range(traj.times.size):
        row = [traj.times[i], *traj.states[i], traj.controls[i]]
        if has_v:
            row.append(traj.clf_values[i])
        if cost is not None:
            row += [cost.state_costs[i], cost.input_costs[i], cost.running[i]]
        lines.append(",".join("%.17g" % float(v) for v in row))
    _atomic_write(path, "\n".join(lines) + "\n")


def write_json(path: str, payload: dict) -> None:
    """Write a JSON document deterministically: sorted keys, stable float
    repr, no timestamps, atomic replace."""
    _atomic_write(path, json.dumps(payload, sort_keys=True, indent=2) + "\n")
