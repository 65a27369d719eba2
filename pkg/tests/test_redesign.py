import math

import pytest

from orthant import predprey
from orthant.errors import DomainError
from orthant.redesign import (
    LinearDeviationExpander,
    RedesignProblem,
    alignment_at,
    check_alignment_on_pairs,
    check_sign_alignment,
    penalty_product,
    penalty_product_check,
    predprey_redesign,
    redesign_weight_r,
    redesigned_feedback,
)
from orthant.shaping import expander
from orthant.systems import log_grid
from orthant.universal import half_universal


def test_linear_deviation_expander():
    e = LinearDeviationExpander(2.0)
    assert e.eval(1.0) == 1.0
    assert e.eval(1.5) == 2.0
    assert e.eval(0.75) == 0.5
    assert e.inverse(2.0) == 1.5
    assert e.slope_at_one() == 2.0
    with pytest.raises(DomainError):
        LinearDeviationExpander(1.0)
    with pytest.raises(DomainError):
        LinearDeviationExpander(0.5)
    with pytest.raises(DomainError):
        e.eval(-1.0)
    with pytest.raises(DomainError):
        e.eval(0.5)  # hits the reach 1 - 1/gain


def test_problem_requires_unit_nominal_at_equilibrium():
    with pytest.raises(ValueError):
        RedesignProblem(
            system=predprey.scaled_input_system(),
            clf=predprey.lyapunov(),
            nominal=lambda s: 2.0,
            expander=LinearDeviationExpander(2.0),
        )


def test_linear_expander_induces_quadratic_penalty():
    problem = predprey_redesign(expander=LinearDeviationExpander(2.0))
    pen = problem.effective_penalty()
    # doubling the deviation: contraction slope 1/2, so the power is 2
    assert math.isclose(pen.eval(2.0), 1.0, rel_tol=1e-9)
    assert math.isclose(pen.eval(1.5), 0.25, rel_tol=1e-9)
    assert math.isclose(pen.eval(1.2) / pen.eval(1.1), 4.0, rel_tol=1e-9)
    assert math.isclose(pen.prime(2.0), 2.0, rel_tol=1e-9)


def test_redesigned_feedback_is_expanded_nominal():
    problem = predprey_redesign()
    for state in ((2.0, 1.0), (0.5, 3.0), (1.3, 0.4)):
        x, y = state
        want = predprey.optimal_feedback(state) / y  # Y * expand(Y/X) / Y
        assert math.isclose(redesigned_feedback(problem, state), want, rel_tol=1e-12)
    assert redesigned_feedback(problem, (1.0, 1.0)) == 1.0


def test_redesign_weight_matches_direct_computation():
    problem = predprey_redesign()
    for state in ((2.0, 1.0), (0.5, 3.0), (1.3, 0.4), (3.0, 0.2)):
        assert math.isclose(
            redesign_weight_r(problem, state),
            predprey.r_weight(state),
            rel_tol=1e-12,
        ), state
    # at the equilibrium the nominal rests: nothing to price
    assert redesign_weight_r(problem, (1.0, 1.0)) == math.inf


def test_alignment_classification():
    assert alignment_at(0.0, 5.0) == "aligned"
    assert alignment_at(1.0, 1.0) == "deactivated"
    assert alignment_at(-2.0, 1.5) == "aligned"
    assert alignment_at(2.0, 1.5) == "misaligned"
    assert alignment_at(2.0, 0.5) == "aligned"
    assert alignment_at(-2.0, 0.5) == "misaligned"


def test_sign_alignment_on_benchmark_grid():
    problem = predprey_redesign()
    report = check_sign_alignment(problem, log_grid(0.4, 2.5, 9, 2))
    assert report.passed, report.summary()


def test_sign_alignment_flags_resting_nominal():
    problem = predprey_redesign()
    resting = RedesignProblem(
        system=problem.system,
        clf=problem.clf,
        nominal=lambda s: 1.0,
        expander=problem.expander,
    )
    report = check_sign_alignment(resting, log_grid(0.4, 2.5, 5, 2))
    assert not report.passed


def test_sign_alignment_flags_wrong_direction():
    problem = predprey_redesign()
    backwards = RedesignProblem(
        system=problem.system,
        clf=problem.clf,
        nominal=lambda s: s[0] / s[1],  # deviates with the channel sign
        expander=problem.expander,
    )
    report = check_sign_alignment(backwards, log_grid(0.5, 2.0, 5, 2))
    assert not report.passed


def test_half_universal_is_aligned_on_rate_pairs():
    pairs = [
        (3.0, -4.0),
        (-1.0, -1.0),
        (0.5, -0.2),
        (-2.0, -5.0),
        (-2.0, 3.0),  # coasting, justified because a < 0
        (-0.1, 0.7),
    ]
    report = check_alignment_on_pairs(
        pairs, half_universal, LinearDeviationExpander(2.0)
    )
    assert report.passed, report.summary()


def test_coasting_without_decrease_is_flagged():
    report = check_alignment_on_pairs(
        [(0.0, 3.0)], lambda a, b: 1.0, LinearDeviationExpander(2.0)
    )
    assert not report.passed


def test_penalty_product_two_routes_agree():
    problem = predprey_redesign()
    cases = [
        ((2.0, 1.0), 2.0),  # nominal below 1, probe above: crosses the rest point
        ((2.0, 1.0), 0.5),
        ((0.5, 1.5), 2.0),
        ((0.5, 1.5), 0.7),
        ((1.4, 0.7), 3.0),
    ]
    for state, omega in cases:
        direct, integral = penalty_product_check(problem, state, omega)
        assert math.isclose(direct, integral, rel_tol=1e-6), (state, omega)
        assert direct > 0.0


def test_penalty_product_vanishes_at_equilibrium_input():
    problem = predprey_redesign()
    assert penalty_product(problem, (2.0, 1.0), 1.0) == 0.0
    assert penalty_product(problem, (2.0, 1.0), 1.0, route="integral") == 0.0


def test_penalty_product_rejects_bad_route_and_resting_state():
    problem = predprey_redesign()
    with pytest.raises(DomainError):
        penalty_product(problem, (2.0, 1.0), 2.0, route="bogus")
    with pytest.raises(DomainError):
        # on the diagonal the nominal ratio is 1: no integral route
        penalty_product(problem, (1.5, 1.5), 2.0, route="integral")


def test_redesign_with_sqrt_expander():
    problem = predprey_redesign(expander=expander("sqrt"))
    # expanded nominal (Y/X)^2; weight from the square-root penalty
    state = (2.0, 1.0)
    assert math.isclose(redesigned_feedback(problem, state), 0.25, rel_tol=1e-12)
    pen = problem.effective_penalty()
    assert math.isclose(pen.eval(4.0), 1.0, rel_tol=1e-12)  # (sqrt(4) - 1)^2
    report = check_sign_alignment(problem, log_grid(0.4, 2.5, 7, 2))
    assert report.passed, report.summary()
