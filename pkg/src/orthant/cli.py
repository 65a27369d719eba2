"""Command-line scenario runner and property-suite driver.

Verbs: ``run <config>`` simulates closed loops declared in a flat key-value
config file and writes CSV trajectories plus a JSON manifest; ``suite
<name>`` executes a named property suite; ``list-systems`` and ``list-laws``
enumerate what can be configured. Exit codes: 0 success, 1 check failure,
2 config error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import direct as direct_mod
from . import predprey, redesign, shaping, universal
from .errors import ConfigError, OrthantError
from .sim import (
    CostSummary,
    IntegratorOptions,
    TrajectoryRecord,
    accumulate_cost,
    integrate,
    lyapunov_monotonicity,
    write_json,
    write_trajectory_csv,
)
from .suites import SUITE_NAMES, run_property_suite
from .systems import (
    ControlAffineSystem,
    ControlLyapunov,
    State,
    available_systems,
    get_system,
    lie_pair,
)

LAW_NAMES = (
    "nominal",
    "expander",
    "optimal-volterra",
    "universal-basic",
    "universal-invopt",
    "half-universal",
    "redesign",
    "direct",
    "continuous-direct",
)
_PREDPREY_ONLY = {"nominal", "expander", "optimal-volterra", "redesign"}
_NEEDS_CONTRACTOR = {"expander", "redesign", "direct", "continuous-direct"}
_CONTRACTOR_CHOICES = ("volterra", "sqrt", "rational", "none")
_R_RULES = ("midpoint", "sqrt-mean")
_KNOWN_KEYS = (
    "system",
    "law",
    "contractor",
    "r_rule",
    "initial_conditions",
    "outputs",
    "integrator.step",
    "integrator.horizon",
    "integrator.stop_tolerance",
    "integrator.record_stride",
)
_MONOTONE_SLACK = 1e-9


@dataclass(frozen=True)
class ScenarioConfig:
    """One validated scenario: a system, one or more laws, and run options."""

    system: str
    laws: tuple[str, ...]
    contractor: str
    r_rule: str
    initial_conditions: tuple[tuple[float, ...], ...]
    integrator: IntegratorOptions
    outputs: str


class _SquareDeviation:
    """Quadratic input price (s - 1)^2 used by the inverse-optimal scalar
    cost, where the weight multiplies the squared deviation."""

    def eval(self, s: float) -> float:
        d = s - 1.0
        return d * d


# ---------------------------------------------------------------------------
# config parsing
# ---------------------------------------------------------------------------


def parse_config_text(text: str) -> dict[str, str]:
    """Parse the flat ``key = value`` format with '#' comments."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        value = value.strip()
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value in {raw!r}")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def _parse_vectors(text: str) -> tuple[tuple[float, ...], ...]:
    vectors = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        parts = chunk.replace(",", " ").split()
        try:
            vectors.append(tuple(float(p) for p in parts))
        except ValueError:
            raise ConfigError(
                f"initial_conditions: cannot parse vector {chunk!r}"
            ) from None
    if not vectors:
        raise ConfigError("initial_conditions: no vectors given")
    return tuple(vectors)


def _parse_float(raw: dict[str, str], key: str, default: float) -> float:
    if key not in raw:
        return default
    try:
        return float(raw[key])
    except ValueError:
        raise ConfigError(f"{key}: not a number: {raw[key]!r}") from None


def _parse_int(raw: dict[str, str], key: str, default: int) -> int:
    if key not in raw:
        return default
    try:
        return int(raw[key])
    except ValueError:
        raise ConfigError(f"{key}: not an integer: {raw[key]!r}") from None


def build_scenario(raw: dict[str, str], out_override: str | None = None) -> ScenarioConfig:
    """Validate a parsed config and resolve every default."""
    for key in raw:
        if key not in _KNOWN_KEYS:
            raise ConfigError(f"{key}: unknown configuration key")
    for key in ("system", "law", "initial_conditions"):
        if key not in raw:
            raise ConfigError(f"{key}: required key is missing")

    system_name = raw["system"]
    if system_name not in available_systems():
        raise ConfigError(
            f"system: unknown system {system_name!r}; registered: "
            f"{', '.join(available_systems())}"
        )
    system, _ = get_system(system_name)

    laws = tuple(part.strip() for part in raw["law"].split(",") if part.strip())
    if not laws:
        raise ConfigError("law: no law named")
    for law in laws:
        if law not in LAW_NAMES:
            raise ConfigError(
                f"law: unknown law {law!r}; available: {', '.join(LAW_NAMES)}"
            )
        if law in _PREDPREY_ONLY and system_name != "predator-prey":
            raise ConfigError(
                f"law: {law!r} is specific to the predator-prey benchmark"
            )
        if law == "universal-basic" and system.equilibrium_input != 1.0:
            raise ConfigError(
                "law: 'universal-basic' requires a system with equilibrium input 1"
            )
    if len(set(laws)) != len(laws):
        raise ConfigError("law: duplicate law named")

    kind = raw.get("contractor", "none")
    if kind not in _CONTRACTOR_CHOICES:
        raise ConfigError(
            f"contractor: unknown kind {kind!r}; choices: "
            f"{', '.join(_CONTRACTOR_CHOICES)}"
        )
    required = [law for law in laws if law in _NEEDS_CONTRACTOR]
    if required and kind == "none":
        raise ConfigError(
            f"contractor: law {required[0]!r} needs a contractor "
            "(volterra, sqrt, or rational)"
        )
    if "optimal-volterra" in laws and kind not in ("none", "volterra"):
        raise ConfigError(
            "contractor: 'optimal-volterra' is pinned to the volterra contractor"
        )
    uses_kind = bool(required) or ("optimal-volterra" in laws and kind == "volterra")
    if kind != "none" and not uses_kind:
        raise ConfigError(
            "contractor: no selected law uses a contractor; set it to none"
        )

    r_rule = raw.get("r_rule", "midpoint")
    if r_rule not in _R_RULES:
        raise ConfigError(f"r_rule: unknown rule {r_rule!r}; choices: midpoint, sqrt-mean")
    if "r_rule" in raw and "direct" not in laws:
        raise ConfigError("r_rule: only the 'direct' law selects a weight rule")

    ics = _parse_vectors(raw["initial_conditions"])
    for ic in ics:
        if len(ic) != system.dim:
            raise ConfigError(
                f"initial_conditions: vector {ic} has {len(ic)} components; "
                f"{system_name} has dimension {system.dim}"
            )
        if system.positive_domain and not all(x > 0.0 for x in ic):
            raise ConfigError(
                f"initial_conditions: {ic} is not strictly positive"
            )

    step = _parse_float(raw, "integrator.step", 1e-3)
    horizon = _parse_float(raw, "integrator.horizon", 200.0)
    stop = _parse_float(raw, "integrator.stop_tolerance", 1e-8)
    stride = _parse_int(raw, "integrator.record_stride", 1)
    if not (step > 0.0):
        raise ConfigError("integrator.step: must be positive")
    if not (horizon > step):
        raise ConfigError("integrator.horizon: must exceed the step")
    if not (stop > 0.0):
        raise ConfigError("integrator.stop_tolerance: must be positive")
    if stride < 1:
        raise ConfigError("integrator.record_stride: must be a positive integer")

    outputs = out_override or raw.get("outputs", "orthant-out")
    return ScenarioConfig(
        system=system_name,
        laws=laws,
        contractor=kind,
        r_rule=r_rule,
        initial_conditions=ics,
        integrator=IntegratorOptions(
            step=step, horizon=horizon, stop_tolerance=stop, record_stride=stride
        ),
        outputs=outputs,
    )


def load_scenario(path: str, out_override: str | None = None) -> ScenarioConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from None
    return build_scenario(parse_config_text(text), out_override)


# ---------------------------------------------------------------------------
# law construction
# ---------------------------------------------------------------------------


def law_feedback(
    law: str,
    system: ControlAffineSystem,
    clf: ControlLyapunov,
    contractor_kind: str,
    r_rule: str,
) -> Callable[[State], float]:
    """Physical-input feedback map for one law on one system."""
    shift = system.equilibrium_input
    if law == "nominal":
        return predprey.nominal_feedback
    if law == "optimal-volterra":
        return predprey.optimal_feedback
    if law == "expander":
        exp = shaping.expander(contractor_kind)
        return lambda st: predprey.optimal_feedback(st, exp)
    if law == "redesign":
        problem = redesign.predprey_redesign(
            expander=shaping.expander(contractor_kind)
        )
        return lambda st: st[1] * redesign.redesigned_feedback(problem, st)
    if law == "universal-basic":

        def basic(st: State) -> float:
            pair = lie_pair(system, clf, st)
            return universal.universal_basic(pair.lf, pair.lg).omega

        return basic
    if law == "universal-invopt":

        def invopt(st: State) -> float:
            pair = lie_pair(system, clf, st)
            return shift + (universal.universal_invopt(pair.a, pair.b).omega - 1.0)

        return invopt
    if law == "half-universal":

        def half(st: State) -> float:
            pair = lie_pair(system, clf, st)
            return shift + (universal.half_universal(pair.a, pair.b) - 1.0)

        return half
    if law == "direct":
        design = direct_mod.direct_design(contractor_kind, r_rule=r_rule)

        def direct_law(st: State) -> float:
            pair = lie_pair(system, clf, st)
            omega_star, _ = direct_mod.direct_feedback(design, pair.a, pair.b)
            return shift + (omega_star - 1.0)

        return direct_law
    if law == "continuous-direct":
        design = direct_mod.direct_design(contractor_kind)

        def cont_law(st: State) -> float:
            omega_star, _ = direct_mod.continuous_feedback(
                design, *_raw_pair(system, clf, st), equilibrium_input=shift
            )
            return shift + (omega_star - 1.0)

        return cont_law
    raise ConfigError(f"law: unknown law {law!r}")


def _raw_pair(system: ControlAffineSystem, clf: ControlLyapunov, st: State):
    pair = lie_pair(system, clf, st)
    return pair.lf, pair.lg


@dataclass(frozen=True)
class _CostModel:
    q_fn: Callable[[State], float]
    weight_fn: Callable[[State], float]
    penalty: object
    ratio_fn: Callable[[State, float], float]


def _cost_model(system: ControlAffineSystem) -> _CostModel | None:
    if system.name == "predator-prey":
        return _CostModel(
            q_fn=predprey.q_state_cost,
            weight_fn=predprey.r_weight,
            penalty=shaping.penalty_from_contractor("volterra"),
            ratio_fn=lambda st, u: u / st[1],
        )
    if system.name == "scalar-x2":
        return _CostModel(
            q_fn=lambda st: universal.scalar_example_costs(st[0]).q_run,
            weight_fn=lambda st: universal.scalar_example_costs(st[0]).r,
            penalty=_SquareDeviation(),
            ratio_fn=lambda st, u: 1.0 + u,
        )
    return None


# ---------------------------------------------------------------------------
# scenario execution
# ---------------------------------------------------------------------------


def _state_names(system: ControlAffineSystem) -> list[str]:
    if system.name == "predator-prey":
        return ["X", "Y"]
    if system.dim == 1:
        return ["x"]
    return [f"x{i + 1}" for i in range(system.dim)]


def _run_one(
    system: ControlAffineSystem,
    clf: ControlLyapunov,
    feedback: Callable[[State], float],
    ic: tuple[float, ...],
    cfg: ScenarioConfig,
) -> tuple[TrajectoryRecord, CostSummary | None]:
    traj = integrate(system, feedback, ic, cfg.integrator, clf=clf)
    model = _cost_model(system)
    cost = None
    if model is not None and cfg.integrator.record_stride == 1:
        cost = accumulate_cost(
            traj,
            model.q_fn,
            model.weight_fn,
            model.penalty,
            model.ratio_fn,
            value_fn=clf.value,
        )
    return traj, cost


def run_scenario(cfg: ScenarioConfig) -> tuple[dict, bool]:
    """Execute every (initial condition, law) pair of a scenario.

    Returns (manifest, ok): the manifest is also written to the output
    directory along with one CSV per run; ok is False when any run failed a
    recorded check or raised a designed error.
    """
    system, clf = get_system(cfg.system)
    os.makedirs(cfg.outputs, exist_ok=True)
    names = _state_names(system)
    runs: list[dict] = []
    ok = True

    feedbacks = {
        law: law_feedback(law, system, clf, cfg.contractor, cfg.r_rule)
        for law in cfg.laws
    }
    totals: dict[tuple[int, str], float] = {}
    for i, ic in enumerate(cfg.initial_conditions):
        for law in cfg.laws:
            entry: dict = {"law": law, "initial_condition": list(ic)}
            csv_name = f"{law}-{i:02d}.csv"
            try:
                traj, cost = _run_one(system, clf, feedbacks[law], ic, cfg)
            except OrthantError as exc:
                entry["error"] = f"{type(exc).__name__}: {exc}"
                ok = False
                runs.append(entry)
                continue
            write_trajectory_csv(
                os.path.join(cfg.outputs, csv_name), traj, cost, state_names=names
            )
            entry["csv"] = csv_name
            entry["steps"] = int(traj.times.size - 1)
            entry["final_time"] = traj.final_time
            entry["final_state"] = [float(x) for x in traj.final_state]
            entry["stopped_early"] = traj.stopped_early
            if system.positive_domain:
                positive = bool(
                    np.all(traj.states > 0.0) and np.all(traj.controls > 0.0)
                )
                entry["positivity_ok"] = positive
                ok = ok and positive
            worst = lyapunov_monotonicity(traj)
            entry["clf_initial"] = float(traj.clf_values[0])
            entry["clf_final"] = float(traj.clf_values[-1])
            entry["clf_worst_increase"] = float(worst)
            entry["clf_monotone"] = bool(worst <= _MONOTONE_SLACK)
            if cost is not None:
                entry["cost"] = {
                    "integral": cost.integral,
                    "tail": cost.tail,
                    "total": cost.total,
                }
                totals[(i, law)] = cost.total
            runs.append(entry)

    manifest: dict = {
        "config": {
            "system": cfg.system,
            "laws": list(cfg.laws),
            "contractor": cfg.contractor,
            "r_rule": cfg.r_rule,
            "initial_conditions": [list(ic) for ic in cfg.initial_conditions],
            "integrator": {
                "step": cfg.integrator.step,
                "horizon": cfg.integrator.horizon,
                "stop_tolerance": cfg.integrator.stop_tolerance,
                "record_stride": cfg.integrator.record_stride,
            },
        },
        "runs": runs,
    }

    if cfg.system == "predator-prey":
        exp = shaping.expander("volterra")
        manifest["expanded_start_ratios"] = [
            {"initial_condition": list(ic), "ratio": ic[1] / ic[0],
             "expanded": exp.eval(ic[1] / ic[0])}
            for ic in cfg.initial_conditions
        ]
        if "nominal" in cfg.laws and "optimal-volterra" in cfg.laws:
            ordering = []
            for i, ic in enumerate(cfg.initial_conditions):
                if (i, "nominal") not in totals or (i, "optimal-volterra") not in totals:
                    continue
                nominal_j = totals[(i, "nominal")]
                optimal_j = totals[(i, "optimal-volterra")]
                lower = bool(optimal_j < nominal_j) or nominal_j == optimal_j == 0.0
                ordering.append(
                    {
                        "initial_condition": list(ic),
                        "nominal_J": nominal_j,
                        "optimal_J": optimal_j,
                        "optimal_not_higher": lower,
                        "relative_saving": (
                            (nominal_j - optimal_j) / nominal_j
                            if nominal_j > 0.0
                            else 0.0
                        ),
                    }
                )
                ok = ok and lower
            manifest["cost_ordering"] = ordering

    write_json(os.path.join(cfg.outputs, "manifest.json"), manifest)
    return manifest, ok


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orthant",
        description="Stabilizing feedback designs on the positive orthant: "
        "scenario runner and property suites.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    p_run = sub.add_parser("run", help="run a scenario config")
    p_run.add_argument("config", help="path to a flat key = value config file")
    p_run.add_argument("--out", help="output directory (overrides 'outputs')")

    p_suite = sub.add_parser("suite", help="run a property suite")
    p_suite.add_argument("name", help=f"one of: {', '.join(SUITE_NAMES)}")
    p_suite.add_argument("--seed", type=int, default=0, help="sampling seed")
    p_suite.add_argument(
        "--grid", type=int, default=64, help="state-grid axis resolution"
    )
    p_suite.add_argument("--out", help="directory for the JSON report")

    sub.add_parser("list-systems", help="list registered systems")
    sub.add_parser("list-laws", help="list feedback laws and their requirements")
    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    cfg = load_scenario(args.config, args.out)
    manifest, ok = run_scenario(cfg)
    for entry in manifest["runs"]:
        ic = entry["initial_condition"]
        if "error" in entry:
            print(f"{entry['law']} ic={ic}: FAILED {entry['error']}")
            continue
        j = entry.get("cost", {}).get("total")
        j_text = f" J={j:.6g}" if j is not None else ""
        print(
            f"{entry['law']} ic={ic}: {entry['steps']} steps, "
            f"final={[f'{x:.6g}' for x in entry['final_state']]}{j_text}"
        )
    for comp in manifest.get("cost_ordering", []):
        print(
            f"cost ordering at ic={comp['initial_condition']}: "
            f"nominal {comp['nominal_J']:.6g} vs optimal {comp['optimal_J']:.6g} "
            f"({'ok' if comp['optimal_not_higher'] else 'VIOLATED'})"
        )
    print(f"manifest: {os.path.join(cfg.outputs, 'manifest.json')}")
    return 0 if ok else 1


def _cmd_suite(args: argparse.Namespace) -> int:
    if args.name not in SUITE_NAMES:
        raise ConfigError(
            f"suite: unknown suite {args.name!r}; available: {', '.join(SUITE_NAMES)}"
        )
    report = run_property_suite(args.name, seed=args.seed, grid_n=args.grid)
    print(report)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        write_json(
            os.path.join(args.out, f"suite-{args.name}.json"), report.to_dict()
        )
    return 0 if report.passed else 1


def _cmd_list_laws() -> int:
    notes = {
        "nominal": "predator-prey only",
        "expander": "predator-prey only; contractor required",
        "optimal-volterra": "predator-prey only; volterra contractor implied",
        "universal-basic": "systems with equilibrium input 1",
        "universal-invopt": "any system",
        "half-universal": "any system",
        "redesign": "predator-prey only; contractor required",
        "direct": "any system; contractor required; r_rule selectable",
        "continuous-direct": "any system; contractor required",
    }
    for law in LAW_NAMES:
        print(f"{law:18s} {notes[law]}")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.verb == "run":
            return _cmd_run(args)
        if args.verb == "suite":
            return _cmd_suite(args)
        if args.verb == "list-systems":
            for name in available_systems():
                print(name)
            return 0
        if args.verb == "list-laws":
            return _cmd_list_laws()
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OrthantError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    raise AssertionError("unreachable verb")


if __name__ == "__main__":
    sys.exit(main())
