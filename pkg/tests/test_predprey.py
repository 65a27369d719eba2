import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from orthant import predprey
from orthant.errors import DomainError
from orthant.shaping import expander, penalty_from_contractor

positive = st.floats(min_value=0.05, max_value=20.0)


def test_deviation_function():
    assert predprey.deviation(1.0) == 0.0
    assert math.isclose(predprey.deviation(2.0), 1.0 - math.log(2.0), rel_tol=1e-14)
    assert predprey.deviation(0.5) > 0.0
    with pytest.raises(DomainError):
        predprey.deviation(0.0)


def test_dynamics_values():
    assert predprey.dynamics((2.0, 1.0), 1.0) == pytest.approx((0.0, 1.0))
    assert predprey.dynamics((1.0, 2.0), 2.0) == pytest.approx((-1.0, -2.0))
    assert predprey.dynamics((1.0, 1.0), 1.0) == pytest.approx((0.0, 0.0))


def test_clf_value_and_gradient():
    v, grad = predprey.clf((2.0, 2.0))
    assert math.isclose(v, math.log(2.0) - 0.5, rel_tol=1e-14)
    assert predprey.clf((1.0, 1.0))[0] == 0.0
    # gradient against central differences
    for st_ in ((2.0, 2.0), (0.5, 3.0), (1.3, 0.4)):
        v0, g = predprey.clf(st_)
        for i in range(2):
            h = 1e-6
            hi = list(st_)
            lo = list(st_)
            hi[i] += h
            lo[i] -= h
            est = (predprey.clf(tuple(hi))[0] - predprey.clf(tuple(lo))[0]) / (2 * h)
            assert math.isclose(est, g[i], rel_tol=1e-5, abs_tol=1e-8)


def test_clf_oracle_values():
    cases = {
        (0.5, 3.0): 3.51509,
        (3.0, 0.5): 1.39038,
        (1.2, 0.8): 0.0877867,
        (0.7, 2.5): 1.37036,
        (2.0, 0.7): 0.59297,
    }
    for state, target in cases.items():
        assert math.isclose(predprey.clf(state)[0], target, rel_tol=1e-4), state


def test_lie_rates():
    assert predprey.lie_LG((2.0, 1.0)) == pytest.approx((-1.0, 0.5))
    assert predprey.lie_LG((1.0, 2.0)) == pytest.approx((2.0, -1.0))
    assert predprey.lie_LG((1.0, 1.0)) == pytest.approx((0.0, 0.0))


def test_state_cost_values():
    assert math.isclose(predprey.q_state_cost((2.0, 1.0)), 0.75, rel_tol=1e-14)
    assert math.isclose(predprey.q_state_cost((1.0, 2.0)), 2.0, rel_tol=1e-14)
    assert predprey.q_state_cost((1.0, 1.0)) == 0.0


@given(positive, positive)
def test_state_cost_is_nominal_decrease(x, y):
    # q = -(L + G * nominal) exactly: the nominal input delivers -q
    lvalue, gvalue = predprey.lie_LG((x, y))
    nominal = predprey.nominal_feedback((x, y))
    q = predprey.q_state_cost((x, y))
    assert math.isclose(q, -(lvalue + gvalue * nominal), rel_tol=1e-9, abs_tol=1e-12)
    assert q >= 0.0


def test_feedback_values():
    assert predprey.nominal_feedback((1.0, 2.0)) == 4.0
    assert predprey.nominal_feedback((2.0, 1.0)) == 0.5
    assert math.isclose(predprey.optimal_feedback((2.0, 1.0)), 0.284668, rel_tol=1e-4)
    assert predprey.optimal_feedback((1.0, 1.0)) == 1.0
    # a non-volterra expander changes the design
    sq = predprey.optimal_feedback((2.0, 1.0), expander("sqrt"))
    assert math.isclose(sq, 1.0 * (0.5) ** 2, rel_tol=1e-12)


def test_weight_factor_and_r():
    assert predprey.volterra_weight_factor(1.0) == 0.5
    # continuity through the series bridge
    for rho in (1.0 - 1e-7, 1.0 + 1e-7):
        assert math.isclose(predprey.volterra_weight_factor(rho), 0.5, abs_tol=1e-6)
    assert math.isclose(predprey.r_weight((1.0, 1.0)), 0.5, rel_tol=1e-12)
    # r(2,1) = 1 * (0.5 - 1) * sigma / (sigma - 1) with sigma = expand(0.5)
    sigma = expander("volterra").eval(0.5)
    target = 1.0 * (0.5 - 1.0) * sigma / (sigma - 1.0)
    assert math.isclose(predprey.r_weight((2.0, 1.0)), target, rel_tol=1e-10)
    assert math.isclose(target, 0.198975, rel_tol=1e-4)


def test_r_weight_with_explicit_penalty_matches_default():
    p = penalty_from_contractor("volterra")
    for state in ((2.0, 1.0), (0.5, 3.0), (1.0 + 1e-8, 1.0)):
        assert math.isclose(
            predprey.r_weight(state),
            predprey.r_weight(state, p),
            rel_tol=1e-6,
        ), state


@settings(max_examples=60)
@given(positive, positive)
def test_weight_is_positive(x, y):
    assert predprey.r_weight((x, y)) > 0.0


def test_stuck_lens_membership():
    assert predprey.s_plus_membership((1.0, 0.5))
    assert not predprey.s_plus_membership((1.0, 1.0))
    assert not predprey.s_plus_membership((5.0, 0.5))
    assert not predprey.s_plus_membership((1.0, 1.5))  # no lens above Y = 1
    # lens boundary at Y = 0.5: X between (2.5 +/- sqrt(5)/2) / ... check ends
    y = 0.5
    center = (3.0 - y) / 2.0
    half = math.sqrt(5.0) * (1.0 - y) / 2.0
    eps = 1e-9
    assert predprey.s_plus_membership((center - half + eps, y))
    assert not predprey.s_plus_membership((center - half - eps, y))
    assert not predprey.s_plus_membership((center + half + eps, y))


@settings(max_examples=150)
@given(positive, positive)
def test_stuck_lens_matches_rate_signs(x, y):
    lvalue, gvalue = predprey.lie_LG((x, y))
    a = lvalue + gvalue
    b = gvalue
    assume(min(abs(a), abs(b)) > 1e-10)  # stay off the knife edge
    assert predprey.s_plus_membership((x, y)) == (a > 0.0 and b > 0.0)


def test_linearizing_design_diagnostics():
    assert predprey.fl_diagnostics((1.0, 3.0)) == (False, False)
    assert predprey.fl_diagnostics((0.5, 2.5)) == (False, False)
    assert predprey.fl_diagnostics((1.0, 1.0)) == (False, False)
    # at X = e^2 the linearizing input goes negative for small predator levels
    x = math.exp(2.0)
    threshold = 1.0 + (2.0 * 2.0 - x) / (3.0 + x)
    assert predprey.fl_diagnostics((x, 0.5))[0] == (0.5 < threshold)
    assert predprey.fl_diagnostics((x, 0.5))[0]
    with pytest.raises(ValueError):
        predprey.fl_diagnostics((2.0, 2.0), k1=1.0, k2=1.0)


def test_offset_curves():
    n, o = predprey.z_curves(1.0)
    assert math.isclose(n, math.log(2.0), rel_tol=1e-14)
    assert o == 0.5
    n, o = predprey.z_curves(math.e - 1.0)
    assert math.isclose(n, 1.0 / (math.e - 1.0), rel_tol=1e-14)
    assert math.isclose(o, 1.0 / math.e, rel_tol=1e-14)
    assert predprey.z_curves(0.0) == (1.0, 1.0)
    with pytest.raises(DomainError):
        predprey.z_curves(-1.0)


def test_penalty_sensitivity_values():
    assert math.isclose(predprey.penalty_sensitivity((1.0, 1.0), 2.0), 0.25, rel_tol=1e-12)
    assert math.isclose(predprey.penalty_sensitivity((1.0, 1.0), 0.5), -0.5, rel_tol=1e-12)
    assert predprey.penalty_sensitivity((1.0, 1.0), 1.0) == 0.0


def test_hamiltonian_vanishes_at_optimal_ratio():
    for state in ((2.0, 1.0), (0.5, 3.0), (1.5, 1.5)):
        h = predprey.hamiltonian(state)
        x, y = state
        sigma = expander("volterra").eval(y / x)
        at_opt = h(sigma)
        scale = max(1.0, abs(predprey.lie_LG(state)[0]))
        assert abs(at_opt) / scale < 1e-10, state
        # and is positive at off-optimal ratios
        assert h(sigma * 2.0) > 0.0
        assert h(sigma * 0.5) > 0.0


def test_hamiltonian_accepts_arrays():
    h = predprey.hamiltonian((2.0, 1.0))
    grid = np.geomspace(0.01, 10.0, 50)
    vals = h(grid)
    assert vals.shape == grid.shape
    assert math.isclose(float(vals[7]), h(float(grid[7])), rel_tol=1e-12)


def test_nominal_ratio():
    assert predprey.nominal_ratio((2.0, 1.0)) == 0.5
    assert predprey.nominal_ratio((1.0, 2.0)) == 2.0


def test_system_constructors():
    sys = predprey.system()
    assert sys.name == "predator-prey"
    assert sys.velocity((2.0, 1.0), 1.0) == pytest.approx((0.0, 1.0))
    clf = predprey.lyapunov()
    assert clf.value((2.0, 2.0)) == pytest.approx(math.log(2.0) - 0.5)
    scaled = predprey.scaled_input_system()
    # the scaled channel absorbs Y: velocity with ratio w matches U = w * Y
    v1 = scaled.velocity((2.0, 1.5), 0.8)
    v2 = predprey.dynamics((2.0, 1.5), 0.8 * 1.5)
    assert v1 == pytest.approx(v2)


def test_rejects_nonpositive_states():
    with pytest.raises(DomainError):
        predprey.dynamics((0.0, 1.0), 1.0)
    with pytest.raises(DomainError):
        predprey.q_state_cost((1.0, -2.0))
