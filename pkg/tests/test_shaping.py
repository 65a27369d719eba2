import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orthant import (
    DomainError,
    contractor,
    custom_contractor,
    expander,
    penalty_from_contractor,
    slope_bridge,
    validate_contractor,
)
from orthant.shaping import asymptotic_exponent, reciprocal_symmetry_residual

KINDS = ("volterra", "sqrt", "rational")


def test_contractor_values():
    th = contractor("volterra")
    assert th.eval(1.0) == 1.0
    assert math.isclose(th.eval(1e3), 1e3 * math.log(1e3) / (1e3 - 1.0), rel_tol=1e-14)
    assert math.isclose(th.eval(1e3), 6.9148, rel_tol=1e-4)
    assert math.isclose(th.eval(1e-3), 0.0069148, rel_tol=1e-4)

    sq = contractor("sqrt")
    assert sq.eval(4.0) == 2.0
    assert sq.eval(0.25) == 0.5

    ra = contractor("rational")
    assert ra.eval(1.0) == pytest.approx(1.0, abs=1e-15)
    # closed form (2s - sqrt(s^2+1) + 1) / (3 - sqrt(2)) at s = 1
    assert math.isclose(
        ra.eval(7.0), (14.0 - math.sqrt(50.0) + 1.0) / (3.0 - math.sqrt(2.0)), rel_tol=1e-14
    )


def test_contractor_slopes_at_one():
    h = 1e-6
    expected = {
        "volterra": 0.5,
        "sqrt": 0.5,
        "rational": (10.0 + math.sqrt(2.0)) / 14.0,
    }
    for kind, slope in expected.items():
        th = contractor(kind)
        est = (th.eval(1.0 + h) - th.eval(1.0 - h)) / (2.0 * h)
        assert math.isclose(est, slope, rel_tol=1e-6), kind
        assert math.isclose(th.derivative_at_one, slope, rel_tol=1e-12)


def test_volterra_series_bridge_is_smooth():
    th = contractor("volterra")
    # the series window must join the closed form without a jump
    for s in (1.0 - 2e-5, 1.0 - 5e-6, 1.0 + 5e-6, 1.0 + 2e-5):
        direct = s * math.log(s) / (s - 1.0)
        assert math.isclose(th.eval(s), direct, rel_tol=1e-12)


def test_unknown_contractor_kind():
    with pytest.raises(DomainError):
        contractor("cubic")


def test_contractor_rejects_nonpositive():
    th = contractor("sqrt")
    with pytest.raises(DomainError):
        th.eval(0.0)
    with pytest.raises(DomainError):
        th.eval(-2.0)


def test_validate_contractor_passes_builtins():
    for kind in KINDS:
        report = validate_contractor(contractor(kind))
        assert report.passed, f"{kind}: {report.failures()}"


def test_validate_contractor_flags_expander_shape():
    # s^2 pushes away from 1 instead of pulling toward it
    bad = custom_contractor(lambda s: s * s, kind="square")
    report = validate_contractor(bad)
    assert not report.passed


@given(st.floats(min_value=1e-3, max_value=1e3))
def test_contractor_pulls_toward_one(s):
    for kind in KINDS:
        th = contractor(kind)
        v = th.eval(s)
        assert (v - s) * (s - 1.0) <= 0.0
        if s != 1.0:
            assert (v - s) * (s - 1.0) < 0.0


def test_expander_oracle_values():
    sig = expander("volterra")
    assert math.isclose(sig.eval(0.35), 0.1605, rel_tol=2e-3)
    assert math.isclose(sig.eval(0.5), 0.284668, rel_tol=1e-5)
    assert math.isclose(sig.eval(2.0), 4.92155, rel_tol=1e-5)
    assert math.isclose(sig.eval(16.0), 8.886e6, rel_tol=1e-3)
    assert math.isclose(sig.eval(1.0 / 16.0), 0.0145627, rel_tol=1e-4)
    assert sig.eval(1.0) == 1.0

    sq = expander("sqrt")
    assert sq.eval(3.0) == 9.0


def test_expander_slope_at_one_is_two():
    h = 1e-6
    for kind in ("volterra", "sqrt"):
        sig = expander(kind)
        est = (sig.eval(1.0 + h) - sig.eval(1.0 - h)) / (2.0 * h)
        assert math.isclose(est, 2.0, rel_tol=1e-5), kind


def test_expander_bracket_route_agrees_with_closed_form():
    sig = expander("volterra")
    for rho in (0.2, 0.7, 1.3, 3.0, 8.0):
        assert math.isclose(
            sig.eval(rho), sig.eval(rho, method="bracket"), rel_tol=1e-10
        )


def test_expander_rational_kind_uses_bracketing():
    sig = expander("rational")
    th = contractor("rational")
    for rho in (0.3, 0.9, 1.5, 4.0):
        assert math.isclose(th.eval(sig.eval(rho)), rho, rel_tol=1e-10)


def test_expander_saturates_to_infinity_past_float_range():
    sig = expander("volterra")
    assert sig.eval(800.0) == math.inf
    assert sig.eval(700.0) < math.inf


@settings(max_examples=200)
@given(st.floats(min_value=1e-3, max_value=1e3))
def test_expander_round_trip(s):
    for kind in KINDS:
        th = contractor(kind)
        sig = expander(kind)
        back = sig.eval(th.eval(s))
        assert abs(back - s) / s < 1e-9, (kind, s, back)


def test_penalty_closed_values():
    p1 = penalty_from_contractor("volterra")
    assert p1.eval(1.0) == 0.0
    assert math.isclose(p1.eval(2.0), 1.0 - math.log(2.0), rel_tol=1e-14)
    assert math.isclose(p1.prime(2.0), 0.5, rel_tol=1e-14)

    p2 = penalty_from_contractor("sqrt")
    assert math.isclose(p2.eval(4.0), 1.0, rel_tol=1e-14)
    assert math.isclose(p2.eval(9.0), 4.0, rel_tol=1e-14)  # (sqrt(s) - 1)^2
    assert math.isclose(p2.prime(4.0), 0.5, rel_tol=1e-14)


def test_penalty_prime_inverse_closed_forms():
    p1 = penalty_from_contractor("volterra")
    assert math.isclose(p1.prime_inverse(-1.0), 0.5, rel_tol=1e-14)
    assert math.isclose(p1.prime_inverse(0.5), 2.0, rel_tol=1e-14)

    p2 = penalty_from_contractor("sqrt")
    assert math.isclose(p2.prime_inverse(2.0 / 3.0), 9.0, rel_tol=1e-14)
    assert p2.prime_inverse(0.0) == 1.0


def test_penalty_prime_inverse_rejects_slopes_at_or_past_one():
    p1 = penalty_from_contractor("volterra")
    # slope 1 - 1/s never reaches 1
    with pytest.raises(DomainError):
        p1.prime_inverse(1.0)


def test_penalty_rate_identity():
    # prime(s) * (s - contracted(s)) recovers the penalty itself
    for kind in KINDS:
        p = penalty_from_contractor(kind)
        th = contractor(kind)
        for s in (0.01, 0.4, 0.9, 1.5, 7.0, 300.0):
            lhs = p.prime(s) * (s - th.eval(s))
            assert math.isclose(lhs, p.eval(s), rel_tol=1e-8), (kind, s)


def test_penalty_series_window_is_smooth():
    p1 = penalty_from_contractor("volterra")
    for s in (1.0 - 2e-4, 1.0 - 5e-5, 1.0 + 5e-5, 1.0 + 2e-4):
        d = s - 1.0
        assert math.isclose(p1.eval(s), d - math.log1p(d), rel_tol=1e-10, abs_tol=1e-18)


def test_penalty_second_derivative_at_one():
    assert math.isclose(
        penalty_from_contractor("volterra").second_derivative_at_one, 1.0, rel_tol=1e-12
    )
    assert math.isclose(
        penalty_from_contractor("sqrt").second_derivative_at_one, 0.5, rel_tol=1e-12
    )


def test_penalty_eval_many_matches_scalar():
    for kind in KINDS:
        p = penalty_from_contractor(kind)
        s = np.geomspace(0.05, 20.0, 25)
        vec = p.eval_many(s)
        scal = np.array([p.eval(float(v)) for v in s])
        np.testing.assert_allclose(vec, scal, rtol=1e-11)


@settings(max_examples=150)
@given(st.floats(min_value=0.01, max_value=100.0))
def test_penalty_positive_and_convex(s):
    for kind in KINDS:
        p = penalty_from_contractor(kind)
        if abs(s - 1.0) < 1e-6:
            continue
        assert p.eval(s) > 0.0
        h = 1e-4 * s
        second = (p.eval(s + h) - 2.0 * p.eval(s) + p.eval(s - h)) / (h * h)
        assert second > 0.0, (kind, s)


@settings(max_examples=100)
@given(st.floats(min_value=0.05, max_value=50.0))
def test_penalty_prime_inverse_round_trip(s):
    for kind in ("volterra", "sqrt"):
        p = penalty_from_contractor(kind)
        y = p.prime(s)
        back = p.prime_inverse(y)
        assert abs(back - s) / s < 1e-9, (kind, s)


def test_slope_bridge_directions_invert():
    for kind in ("volterra", "sqrt"):
        br = slope_bridge(kind)
        for w in (1.2, 2.0, 8.0):
            y = br.slope_for_ratio(w)
            assert 0.0 < y < 1.0
            # ratio_for_slope returns the contracted image of the attaining ratio
            s = br.penalty.prime_inverse(y)
            assert math.isclose(br.ratio_for_slope(y), br.contractor.eval(s), rel_tol=1e-10)


def test_slope_bridge_fast_paths_match_generic():
    for kind in ("volterra", "sqrt"):
        br = slope_bridge(kind)
        for w in (1.1, 1.7, 3.0, 12.0):
            fast = br.slope_for_ratio(w)
            generic = br.penalty.prime(br.expander.eval(w))
            assert math.isclose(fast, generic, rel_tol=1e-10), (kind, w)


def test_slope_bridge_rejects_ratios_at_or_below_one():
    br = slope_bridge("sqrt")
    with pytest.raises(DomainError):
        br.slope_for_ratio(1.0)
    with pytest.raises(DomainError):
        br.ratio_for_slope(-0.5)


def test_reciprocal_symmetry_closed_penalties():
    for kind in ("volterra", "sqrt"):
        p = penalty_from_contractor(kind)
        for s in (0.01, 0.3, 2.0, 40.0):
            assert abs(reciprocal_symmetry_residual(p, s)) < 1e-9, (kind, s)


def test_asymptotic_exponent_recovers_powers():
    assert math.isclose(
        asymptotic_exponent(lambda s: s**3, "infinity", (1e2, 1e4)), 3.0, rel_tol=1e-9
    )
    assert math.isclose(
        asymptotic_exponent(lambda s: s**-1.5, "zero", (1e-5, 1e-3)), -1.5, rel_tol=1e-9
    )
    with pytest.raises(DomainError):
        asymptotic_exponent(lambda s: s, "zero", (0.5, 2.0))
    with pytest.raises(DomainError):
        asymptotic_exponent(lambda s: s, "sideways", (2.0, 4.0))


def test_rational_penalty_exponents():
    p3 = penalty_from_contractor("rational")
    near_zero = asymptotic_exponent(p3.eval, "zero", (1e-7, 1e-5))
    assert math.isclose(near_zero, -(1.0 + 2.0 * math.sqrt(2.0)), rel_tol=0.02)
    # the tail exponent equals 1 / (1 - limiting contractor slope)
    tail = asymptotic_exponent(p3.eval, "infinity", (1e3, 1e5))
    assert math.isclose(tail, (4.0 + math.sqrt(2.0)) / 2.0, rel_tol=0.02)


def test_rational_contractor_limit_prefactors():
    th = contractor("rational")
    c = 3.0 - math.sqrt(2.0)
    assert math.isclose(th.eval(1e-7) / 1e-7, 2.0 / c, rel_tol=1e-3)
    # at infinity the slope tends to 1/(3 - sqrt(2)), twice the naive halving
    assert math.isclose(th.eval(1e7) / 1e7, 1.0 / c, rel_tol=1e-3)


def test_closed_penalty_tail_slopes_near_one():
    for kind in ("volterra", "sqrt"):
        p = penalty_from_contractor(kind)
        slope = asymptotic_exponent(p.eval, "infinity", (1e3, 1e5))
        assert math.isclose(slope, 1.0, rel_tol=0.02), kind
