"""Ratio-shaping calculus.

A contractor is a strictly increasing map of (0, inf) onto itself that fixes 1
and pulls every other ratio toward 1. Its inverse (the expander) pushes ratios
away from 1. Each contractor induces a penalty function through the first-order
identity  penalty'(s) * (s - contractor(s)) = penalty(s), penalty(1) = 0,
which makes the penalty vanish only at 1, decay/grow like a power of |s - 1|
near 1, and inherit convexity from the contractor geometry.

Built-in contractor kinds:

* ``volterra``  s ln s / (s - 1); induced penalty s - 1 - ln s.
* ``sqrt``      square root; induced penalty (sqrt(s) - 1)^2.
* ``rational``  (2s - sqrt(s^2 + 1) + 1)/(3 - sqrt 2); penalty by quadrature.

Custom contractors get their penalty by quadrature of the defining identity,
with one normalization constant per side of the fixed point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.special import lambertw

from .errors import DomainError
from .numerics import adaptive_simpson, expand_bracket, solve_bracketed
from .reporting import CheckReport

__all__ = [
    "Contractor",
    "Expander",
    "Penalty",
    "SlopeBridge",
    "contractor",
    "custom_contractor",
    "validate_contractor",
    "expander",
    "penalty_from_contractor",
    "slope_bridge",
    "reciprocal_symmetry_residual",
    "asymptotic_exponent",
]

SQRT2 = math.sqrt(2.0)
_RAT_DEN = 3.0 - SQRT2

# Below this distance from the fixed point, ratio-form contractor and penalty
# formulas lose digits to cancellation and Taylor forms take over.
_SERIES_CUT = 1e-5
_PENALTY_SERIES_CUT = 1e-4
# Quadrature-backed penalties switch to a pure power model this close to 1.
_POWER_CUT = 1e-8
# The integrand of the penalty identity uses a linearized denominator here.
_INTEGRAND_CUT = 1e-6
# Distance from 1 at which quadrature-backed penalties are normalized.
_NORM_OFFSET = 1e-4


# ---------------------------------------------------------------------------
# contractors
# ---------------------------------------------------------------------------


def _volterra_theta(s: float) -> float:
    d = s - 1.0
    if abs(d) < _SERIES_CUT:
        return 1.0 + d * (0.5 + d * (-1.0 / 6.0 + d * (1.0 / 12.0 + d * (-1.0 / 20.0))))
    return s * math.log(s) / d


def _sqrt_theta(s: float) -> float:
    return math.sqrt(s)


def _rational_theta(s: float) -> float:
    # 2s - sqrt(s^2+1) + 1 == 2s - s^2/(sqrt(s^2+1) + 1), stable for small s
    return (2.0 * s - s * s / (math.hypot(s, 1.0) + 1.0)) / _RAT_DEN


_BUILTIN_CONTRACTORS: dict[str, tuple[Callable[[float], float], float]] = {
    "volterra": (_volterra_theta, 0.5),
    "sqrt": (_sqrt_theta, 0.5),
    "rational": (_rational_theta, (10.0 + SQRT2) / 14.0),
}


@dataclass(frozen=True)
class Contractor:
    """Strictly increasing self-map of (0, inf) fixing 1 and pulling toward it."""

    kind: str
    fn: Callable[[float], float]
    derivative_at_one: float

    def eval(self, s: float) -> float:
        if not (s > 0.0):
            raise DomainError(f"contractor argument must be positive, got {s}")
        return self.fn(s)

    def __call__(self, s: float) -> float:
        return self.eval(s)


def contractor(kind: str) -> Contractor:
    """Return a built-in contractor by kind name."""
    try:
        fn, slope = _BUILTIN_CONTRACTORS[kind]
    except KeyError:
        raise DomainError(
            f"unknown contractor kind {kind!r}; built-ins are "
            f"{sorted(_BUILTIN_CONTRACTORS)}"
        ) from None
    return Contractor(kind, fn, slope)


def custom_contractor(
    fn: Callable[[float], float],
    *,
    derivative_at_one: float | None = None,
    kind: str = "custom",
) -> Contractor:
    """Wrap a user map as a contractor.

    The slope at the fixed point is estimated by central difference when not
    supplied; it must lie in (0, 1) for the induced penalty to exist.
    """
    if derivative_at_one is None:
        h = 1e-6
        derivative_at_one = (fn(1.0 + h) - fn(1.0 - h)) / (2.0 * h)
    return Contractor(kind, fn, float(derivative_at_one))


def validate_contractor(c: Contractor, grid: Sequence[float] | None = None) -> CheckReport:
    """Check the defining properties of a contractor on a ratio grid.

    The open-ended limits (collapse at 0, unbounded growth) are checked by
    proxy at the grid extremes.
    """
    if grid is None:
        grid = np.geomspace(1e-3, 1e3, 241)
    pts = sorted(float(s) for s in grid)
    if pts[0] <= 0.0:
        raise DomainError("validation grid must be positive")
    report = CheckReport(f"contractor[{c.kind}]")
    vals = [c.eval(s) for s in pts]

    rising = all(b > a for a, b in zip(vals, vals[1:]))
    worst = min((b - a for a, b in zip(vals, vals[1:])), default=0.0)
    report.add("strictly-increasing", rising, f"smallest consecutive gap {worst:.3e}")

    fp = c.eval(1.0)
    report.add("fixed-point-at-one", abs(fp - 1.0) <= 1e-12, f"value at 1 is {fp!r}")

    bad = [s for s, v in zip(pts, vals) if abs(s - 1.0) > 1e-9 and (v - s) * (s - 1.0) >= 0.0]
    report.add(
        "pulls-toward-one",
        not bad,
        "every ratio moved strictly toward 1" if not bad else f"violated at s={bad[:3]}",
    )

    h = 1e-6
    est = (c.eval(1.0 + h) - c.eval(1.0 - h)) / (2.0 * h)
    slope_ok = 0.0 < c.derivative_at_one < 1.0 and abs(est - c.derivative_at_one) <= 1e-4
    report.add(
        "slope-at-one-inside-unit-interval",
        slope_ok,
        f"declared {c.derivative_at_one:.12g}, measured {est:.12g}",
    )

    report.add(
        "collapses-toward-zero",
        vals[0] < 0.5,
        f"value {vals[0]:.3e} at smallest grid ratio {pts[0]:.3e}",
    )
    report.add(
        "grows-without-bound",
        vals[-1] > 2.0,
        f"value {vals[-1]:.6g} at largest grid ratio {pts[-1]:.6g}",
    )
    return report


# ---------------------------------------------------------------------------
# expanders
# ---------------------------------------------------------------------------


def _volterra_sigma(rho: float) -> float:
    """Inverse of s ln s / (s - 1) via the two real branches of Lambert W."""
    w = rho - 1.0
    if abs(w) <= 1e-4:
        return 1.0 + w * (2.0 + w * (4.0 / 3.0 + w * (4.0 / 9.0 + w * (16.0 / 135.0))))
    branch = 0 if rho > 1.0 else -1
    t = float(lambertw(-rho * math.exp(-rho), branch).real)
    if rho + t > 709.0:  # past the float range; the true value only grows
        return math.inf
    sig = math.exp(rho + t)
    if sig > 1e150:  # polish would overflow d*d; the seed is already sharp
        return sig
    for _ in range(2):  # Newton polish to machine precision
        d = sig - 1.0
        ls = math.log(sig)
        slope = (d - ls) / (d * d)
        nxt = sig - (sig * ls / d - rho) / slope
        if nxt > 0.0:
            sig = nxt
    return sig


@dataclass(frozen=True)
class Expander:
    """Inverse of a contractor: pushes every ratio away from 1."""

    contractor: Contractor

    def eval(self, s: float, *, method: str = "auto") -> float:
        if not (s > 0.0):
            raise DomainError(f"expander argument must be positive, got {s}")
        if method not in ("auto", "bracket"):
            raise DomainError(f"unknown expander method {method!r}")
        if method == "auto":
            kind = self.contractor.kind
            if kind == "sqrt":
                return s * s
            if kind == "volterra":
                return _volterra_sigma(s)
        return self._bracket_solve(s)

    def __call__(self, s: float) -> float:
        return self.eval(s)

    def _bracket_solve(self, target: float) -> float:
        theta = self.contractor.eval

        def gap(x: float) -> float:
            return theta(x) - target

        lo, hi = expand_bracket(gap, target)
        if lo == hi:
            return lo
        return solve_bracketed(gap, lo, hi, rtol=1e-12)


def expander(c: Contractor | str) -> Expander:
    if isinstance(c, str):
        c = contractor(c)
    return Expander(c)


# ---------------------------------------------------------------------------
# penalties
# ---------------------------------------------------------------------------


def _psi_volterra(s: float) -> float:
    d = s - 1.0
    if abs(d) < _PENALTY_SERIES_CUT:
        return d * d * (0.5 + d * (-1.0 / 3.0 + d * (0.25 + d * (-0.2))))
    return d - math.log1p(d)


def _psi_volterra_prime(s: float) -> float:
    return (s - 1.0) / s


def _psi_sqrt(s: float) -> float:
    t = (s - 1.0) / (math.sqrt(s) + 1.0)  # sqrt(s) - 1 without cancellation
    return t * t


def _psi_sqrt_prime(s: float) -> float:
    root = math.sqrt(s)
    return (s - 1.0) / ((root + 1.0) * root)


def _psi_volterra_np(arr: np.ndarray) -> np.ndarray:
    d = arr - 1.0
    out = d - np.log1p(d)
    small = np.abs(d) < _PENALTY_SERIES_CUT
    if np.any(small):
        ds = d[small]
        out[small] = ds * ds * (0.5 + ds * (-1.0 / 3.0 + ds * (0.25 + ds * (-0.2))))
    return out


def _psi_sqrt_np(arr: np.ndarray) -> np.ndarray:
    t = (arr - 1.0) / (np.sqrt(arr) + 1.0)
    return t * t


_CLOSED_PENALTIES = {
    "volterra": (_psi_volterra, _psi_volterra_prime, _psi_volterra_np, 0.5),
    "sqrt": (_psi_sqrt, _psi_sqrt_prime, _psi_sqrt_np, 0.25),
}


@dataclass(frozen=True)
class Penalty:
    """Input penalty induced by a contractor.

    Vanishes only at 1, behaves like coeff * |s - 1|**local_power near 1, and
    satisfies  prime(s) * (s - contractor(s)) = eval(s)  away from 1. Closed
    forms back the volterra and sqrt kinds; other kinds integrate the identity
    from one anchor ratio on each side of 1.
    """

    kind: str
    contractor: Contractor
    form: str  # "closed" or "quadrature"
    anchors: tuple[float, float]
    branch_scales: tuple[float, float]  # penalty values at the anchors
    local_power: float
    near_one_coeffs: tuple[float, float]
    prime_upper: float  # supremum of prime over (1, inf)
    side_multipliers: tuple[float, float] = (1.0, 1.0)  # closed forms only

    # -- scalar evaluation --------------------------------------------------

    def eval(self, s: float) -> float:
        if not (s > 0.0):
            raise DomainError(f"penalty argument must be positive, got {s}")
        if s == 1.0:
            return 0.0
        if self.form == "closed":
            fn = _CLOSED_PENALTIES[self.kind][0]
            return self._mult(s) * fn(s)
        d = s - 1.0
        if abs(d) <= _POWER_CUT:
            c = self.near_one_coeffs[0] if d < 0.0 else self.near_one_coeffs[1]
            return c * abs(d) ** self.local_power
        if s < 1.0:
            return self.branch_scales[0] * math.exp(self._log_ratio(self.anchors[0], s))
        return self.branch_scales[1] * math.exp(self._log_ratio(self.anchors[1], s))

    def __call__(self, s: float) -> float:
        return self.eval(s)

    def prime(self, s: float) -> float:
        if not (s > 0.0):
            raise DomainError(f"penalty argument must be positive, got {s}")
        if s == 1.0:
            return 0.0
        if self.form == "closed":
            fn = _CLOSED_PENALTIES[self.kind][1]
            return self._mult(s) * fn(s)
        d = s - 1.0
        if abs(d) <= _POWER_CUT:
            c = self.near_one_coeffs[0] if d < 0.0 else self.near_one_coeffs[1]
            p = self.local_power
            return math.copysign(c * p * abs(d) ** (p - 1.0), d)
        if abs(d) < _INTEGRAND_CUT:
            den = (1.0 - self.contractor.derivative_at_one) * d
        else:
            den = s - self.contractor.eval(s)
        return self.eval(s) / den

    def prime_inverse(self, y: float) -> float:
        """Ratio at which the penalty has slope y.

        Slopes below 0 land left of 1, above 0 right of 1; y = 0 returns 1.
        """
        if y == 0.0:
            return 1.0
        mult = self.side_multipliers[1] if y > 0.0 else self.side_multipliers[0]
        if self.form == "closed":
            yy = y / mult
            if yy >= 1.0:
                raise DomainError(
                    f"slope {y} outside the open range (-inf, {mult}) of this penalty"
                )
            if self.kind == "volterra":
                return 1.0 / (1.0 - yy)
            root = 1.0 / (1.0 - yy)
            return root * root
        c = self.near_one_coeffs[1] if y > 0.0 else self.near_one_coeffs[0]
        p = self.local_power
        guess = (abs(y) / (c * p)) ** (1.0 / (p - 1.0))
        seed = 1.0 + guess if y > 0.0 else (1.0 - guess if guess < 0.5 else 0.5)

        def gap(x: float) -> float:
            return self.prime(x) - y

        lo, hi = expand_bracket(gap, seed)
        if lo == hi:
            return lo
        return solve_bracketed(gap, lo, hi, rtol=1e-12)

    # -- vectorized evaluation ---------------------------------------------

    def eval_many(self, values: Iterable[float] | np.ndarray) -> np.ndarray:
        """Evaluate on many ratios at once.

        For quadrature-backed kinds the points are sorted and the identity is
        integrated cumulatively along each side of 1, so a dense sweep costs
        one pass instead of one full integral per point.
        """
        arr = np.asarray(values, dtype=float)
        flat = arr.ravel()
        if flat.size == 0:
            return np.reshape(np.empty(0), arr.shape)
        if not np.all(flat > 0.0):
            raise DomainError("penalty arguments must all be positive")
        if self.form == "closed":
            fn = _CLOSED_PENALTIES[self.kind][2]
            out = fn(flat)
            m_lo, m_hi = self.side_multipliers
            if m_lo != 1.0 or m_hi != 1.0:
                out = np.where(flat < 1.0, m_lo * out, m_hi * out)
            return out.reshape(arr.shape)

        out = np.empty_like(flat)
        d = flat - 1.0
        near = np.abs(d) <= _POWER_CUT
        if np.any(near):
            coeff = np.where(d[near] < 0.0, self.near_one_coeffs[0], self.near_one_coeffs[1])
            out[near] = coeff * np.abs(d[near]) ** self.local_power
        for low_side in (True, False):
            mask = ((flat < 1.0) if low_side else (flat > 1.0)) & ~near
            if not np.any(mask):
                continue
            anchor = self.anchors[0] if low_side else self.anchors[1]
            scale = self.branch_scales[0] if low_side else self.branch_scales[1]
            pts = np.unique(flat[mask])
            chain = np.unique(np.concatenate([pts, [anchor]]))
            integrand = self._integrand()
            segs = np.zeros(chain.size)
            for i in range(chain.size - 1):
                segs[i + 1] = adaptive_simpson(integrand, chain[i], chain[i + 1], tol=1e-10)
            cum = np.cumsum(segs)
            cum -= cum[np.searchsorted(chain, anchor)]
            logvals = dict(zip(chain.tolist(), cum.tolist()))
            out[mask] = [scale * math.exp(logvals[v]) for v in flat[mask]]
        return out.reshape(arr.shape)

    # -- local structure ----------------------------------------------------

    @property
    def second_derivative_at_one(self) -> float:
        p = self.local_power
        if p == 2.0:
            return self.near_one_coeffs[0] + self.near_one_coeffs[1]
        if p > 2.0:
            return 0.0
        return math.inf

    # -- internals ----------------------------------------------------------

    def _mult(self, s: float) -> float:
        return self.side_multipliers[0] if s < 1.0 else self.side_multipliers[1]

    def _integrand(self) -> Callable[[float], float]:
        theta = self.contractor.eval
        slope = 1.0 - self.contractor.derivative_at_one

        def integrand(tau: float) -> float:
            d = tau - 1.0
            if abs(d) < _INTEGRAND_CUT:
                return 1.0 / (slope * d)
            return 1.0 / (tau - theta(tau))

        return integrand

    def _log_ratio(self, a: float, s: float) -> float:
        return adaptive_simpson(self._integrand(), a, s, tol=1e-10)


def penalty_from_contractor(
    c: Contractor | str,
    *,
    anchors: tuple[float, float] = (0.5, 2.0),
    scales: tuple[float, float] | None = None,
) -> Penalty:
    """Build the penalty induced by a contractor.

    ``anchors`` places one reference ratio on each side of 1; ``scales`` pins
    the penalty value at each anchor. By default the closed kinds keep their
    classical normalization and quadrature-backed kinds equalize the leading
    coefficient of |s - 1|**p on both sides, so the penalty is continuous in
    shape through the minimum.
    """
    if isinstance(c, str):
        c = contractor(c)
    a_lo, a_hi = anchors
    if not (0.0 < a_lo < 1.0 < a_hi):
        raise DomainError(f"anchors must straddle 1, got {anchors}")
    if not (0.0 < c.derivative_at_one < 1.0):
        raise DomainError(
            "penalty requires the contractor slope at 1 inside (0, 1), "
            f"got {c.derivative_at_one}"
        )

    if c.kind in _CLOSED_PENALTIES:
        closed_fn, _, _, near_c = _CLOSED_PENALTIES[c.kind]
        base = (closed_fn(a_lo), closed_fn(a_hi))
        if scales is None:
            sc = base
            mults = (1.0, 1.0)
        else:
            sc = (float(scales[0]), float(scales[1]))
            mults = (sc[0] / base[0], sc[1] / base[1])
        return Penalty(
            kind=c.kind,
            contractor=c,
            form="closed",
            anchors=(a_lo, a_hi),
            branch_scales=sc,
            local_power=2.0,
            near_one_coeffs=(near_c * mults[0], near_c * mults[1]),
            prime_upper=mults[1] * 1.0,
            side_multipliers=mults,
        )

    p = 1.0 / (1.0 - c.derivative_at_one)
    probe = Penalty(
        kind=c.kind,
        contractor=c,
        form="quadrature",
        anchors=(a_lo, a_hi),
        branch_scales=(1.0, 1.0),
        local_power=p,
        near_one_coeffs=(1.0, 1.0),
        prime_upper=math.inf,
    )
    log_lo = probe._log_ratio(a_lo, 1.0 - _NORM_OFFSET)
    log_hi = probe._log_ratio(a_hi, 1.0 + _NORM_OFFSET)
    target = _NORM_OFFSET**p
    if scales is None:
        sc = (target / math.exp(log_lo), target / math.exp(log_hi))
    else:
        sc = (float(scales[0]), float(scales[1]))
    coeffs = (
        sc[0] * math.exp(log_lo) / target,
        sc[1] * math.exp(log_hi) / target,
    )
    return Penalty(
        kind=c.kind,
        contractor=c,
        form="quadrature",
        anchors=(a_lo, a_hi),
        branch_scales=sc,
        local_power=p,
        near_one_coeffs=coeffs,
        prime_upper=math.inf,
    )


# ---------------------------------------------------------------------------
# slope bridge
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SlopeBridge:
    """Bijection between penalty slopes and contracted ratios.

    ``ratio_for_slope`` maps a slope y >= 0 of the penalty to the contracted
    image of the ratio attaining it; ``slope_for_ratio`` is its inverse on
    ratios above 1. Both directions are strictly increasing.
    """

    contractor: Contractor
    expander: Expander
    penalty: Penalty

    def ratio_for_slope(self, y: float) -> float:
        if y < 0.0:
            raise DomainError(f"slope must be nonnegative, got {y}")
        if y == 0.0:
            return 1.0
        return self.contractor.eval(self.penalty.prime_inverse(y))

    def slope_for_ratio(self, w: float) -> float:
        if not (w > 1.0):
            raise DomainError(f"ratio must exceed 1, got {w}")
        kind = self.contractor.kind
        if kind == "sqrt" and self.penalty.side_multipliers == (1.0, 1.0):
            return 1.0 - 1.0 / w
        if kind == "volterra" and self.penalty.side_multipliers == (1.0, 1.0):
            return 1.0 - 1.0 / self.expander.eval(w)
        return self.penalty.prime(self.expander.eval(w))


def slope_bridge(c: Contractor | str, penalty: Penalty | None = None) -> SlopeBridge:
    if isinstance(c, str):
        c = contractor(c)
    if penalty is None:
        penalty = penalty_from_contractor(c)
    return SlopeBridge(c, Expander(c), penalty)


# ---------------------------------------------------------------------------
# structural diagnostics
# ---------------------------------------------------------------------------


def reciprocal_symmetry_residual(penalty: Penalty, s: float) -> float:
    """Deviation from the reciprocal balance of a penalty at ratio s.

    The normalized share  eval(s) / ((s - 1) * prime(s))  of a ratio and of
    its reciprocal sum to 1 for the volterra and sqrt penalties; the returned
    residual is that sum minus 1.
    """
    if not (s > 0.0):
        raise DomainError(f"ratio must be positive, got {s}")
    if s == 1.0:
        raise DomainError("reciprocal balance is undefined at the fixed point 1")

    def share(t: float) -> float:
        return penalty.eval(t) / ((t - 1.0) * penalty.prime(t))

    return share(s) + share(1.0 / s) - 1.0


def asymptotic_exponent(
    fn: Callable[[float], float],
    side: str,
    window: tuple[float, float],
    *,
    num_points: int = 16,
) -> float:
    """Least-squares log-log slope of a positive function over a window.

    ``side`` must be ``"zero"`` (window below 1) or ``"infinity"`` (window
    above 1) and names the limit whose power law is being measured. At least
    8 geometrically spaced sample points are used.
    """
    lo, hi = window
    if not (0.0 < lo < hi):
        raise DomainError(f"window must satisfy 0 < lo < hi, got {window}")
    if side == "zero":
        if hi >= 1.0:
            raise DomainError("window for the zero-side exponent must lie below 1")
    elif side == "infinity":
        if lo <= 1.0:
            raise DomainError("window for the infinity-side exponent must lie above 1")
    else:
        raise DomainError(f"side must be 'zero' or 'infinity', got {side!r}")
    if num_points < 8:
        raise DomainError(f"need at least 8 sample points, got {num_points}")
    s = np.geomspace(lo, hi, num_points)
    vals = np.array([fn(float(x)) for x in s])
    if not np.all(vals > 0.0):
        raise DomainError("function must be strictly positive on the window")
    slope = np.polyfit(np.log(s), np.log(vals), 1)[0]
    return float(slope)
