import math

import pytest

from orthant import predprey
from orthant.errors import DomainError
from orthant.systems import (
    ControlAffineSystem,
    ControlLyapunov,
    available_systems,
    check_clf_strong,
    check_clf_weak,
    get_system,
    lie_pair,
    log_grid,
    register_system,
)


def test_registry_builtins():
    assert available_systems() == ["predator-prey", "scalar-x2"]
    system, clf = get_system("predator-prey")
    assert system.dim == 2
    assert system.equilibrium == (1.0, 1.0)
    assert system.equilibrium_input == 1.0
    assert system.positive_domain

    scalar, sclf = get_system("scalar-x2")
    assert scalar.dim == 1
    assert scalar.equilibrium == (0.0,)
    assert scalar.equilibrium_input == 0.0
    assert not scalar.positive_domain
    assert sclf.value((2.0,)) == 2.0  # x^2 / 2


def test_unknown_system_names_alternatives():
    with pytest.raises(KeyError, match="predator-prey"):
        get_system("lorenz")


def test_register_rejects_duplicates():
    system, clf = get_system("scalar-x2")
    with pytest.raises(ValueError):
        register_system("scalar-x2", system, clf)
    register_system("scalar-x2", system, clf, replace=True)


def test_equilibrium_residual_is_enforced():
    with pytest.raises(ValueError, match="equilibrium residual"):
        ControlAffineSystem(
            name="broken",
            dim=1,
            drift=lambda s: (1.0,),
            input_field=lambda s: (0.0,),
            equilibrium=(0.0,),
            equilibrium_input=0.0,
            positive_domain=False,
        )


def test_velocity_and_domain():
    system, _ = get_system("predator-prey")
    assert system.velocity((2.0, 1.0), 1.0) == pytest.approx((0.0, 1.0))
    assert system.velocity((1.0, 2.0), 2.0) == pytest.approx((-1.0, -2.0))
    assert system.in_domain((0.5, 0.5))
    assert not system.in_domain((0.5, -0.5))
    assert not system.in_domain((0.5,))
    assert not system.in_domain((math.inf, 1.0))


def test_lie_pair_predprey_values():
    system, clf = get_system("predator-prey")
    pair = lie_pair(system, clf, (2.0, 1.0))
    assert math.isclose(pair.lf, -1.0, rel_tol=1e-12)
    assert math.isclose(pair.lg, 0.5, rel_tol=1e-12)
    assert math.isclose(pair.a, -0.5, rel_tol=1e-12)
    assert pair.b == pair.lg

    pair = lie_pair(system, clf, (1.0, 2.0))
    assert math.isclose(pair.lf, 2.0, rel_tol=1e-12)
    assert math.isclose(pair.lg, -1.0, rel_tol=1e-12)


def test_lie_pair_scalar_values():
    system, clf = get_system("scalar-x2")
    pair = lie_pair(system, clf, (1.0,))
    assert pair.lf == 1.0
    assert pair.lg == -1.0
    assert pair.a == 1.0  # equilibrium input is 0 here

    with pytest.raises(DomainError):
        lie_pair(*get_system("predator-prey"), (1.0, -1.0))


def test_gradient_check_passes_for_builtins():
    pts = log_grid(0.3, 3.0, 5, 2)
    _, clf = get_system("predator-prey")
    assert clf.check_gradient(pts).passed

    _, sclf = get_system("scalar-x2")
    assert sclf.check_gradient([(-2.0,), (0.5,), (3.0,)]).passed


def test_log_grid_shape_and_exclusion():
    states = log_grid(0.25, 4.0, 16, 2)
    assert len(states) == 256
    assert states[0] == (0.25, 0.25)
    assert states[-1] == (4.0, 4.0)
    # a 17-point axis contains 1.0 exactly, so the equilibrium gets dropped
    excl = log_grid(0.25, 4.0, 17, 2, exclude_equilibrium=(1.0, 1.0))
    assert len(excl) == 17 * 17 - 1
    with pytest.raises(DomainError):
        log_grid(-1.0, 2.0)


def test_clf_checks_pass_for_predprey():
    system, clf = get_system("predator-prey")
    grid = log_grid(0.2, 5.0, 24, 2, exclude_equilibrium=(1.0, 1.0))
    assert check_clf_weak(system, clf, grid).passed
    # the strong shifted-rate condition fails inside the stuck lens
    strong = check_clf_strong(system, clf, grid)
    assert not strong.passed


def test_strong_clf_failure_is_the_stuck_lens():
    system, clf = get_system("predator-prey")
    # (1, 0.5) sits inside the lens: both shifted rates are positive there
    pair = lie_pair(system, clf, (1.0, 0.5))
    assert pair.a > 0.0 and pair.b > 0.0
    report = check_clf_strong(system, clf, [(1.0, 0.5)])
    assert not report.passed


def test_weak_clf_rejects_constant_function():
    system, _ = get_system("predator-prey")
    flat = ControlLyapunov(value=lambda s: 1.0, gradient=lambda s: (0.0, 0.0))
    report = check_clf_weak(system, flat, [(2.0, 1.0), (0.5, 0.5)])
    assert not report.passed  # lg = 0 everywhere but lf = 0 is not < 0
