"""Root finding and quadrature primitives.

Deterministic, dependency-free building blocks: geometric bracket expansion
for monotone maps, a bisection/secant hybrid solver, and recursive adaptive
Simpson quadrature with a fixed per-subinterval tolerance.
"""

from __future__ import annotations

import math
from typing import Callable

from .errors import BracketError, QuadratureError

__all__ = ["expand_bracket", "solve_bracketed", "adaptive_simpson"]


def expand_bracket(
    f: Callable[[float], float],
    seed: float,
    *,
    factor: float = 2.0,
    max_steps: int = 200,
) -> tuple[float, float]:
    """Find [lo, hi] with f(lo) <= 0 <= f(hi) for an increasing f on (0, inf).

    Starts at a positive seed and doubles or halves geometrically depending on
    the sign of f(seed). Raises BracketError after max_steps expansions.
    """
    if not (seed > 0.0 and math.isfinite(seed)):
        raise BracketError(f"bracket seed must be positive and finite, got {seed}")
    f0 = f(seed)
    if f0 == 0.0:
        return seed, seed
    if f0 < 0.0:
        lo, hi = seed, seed * factor
        for _ in range(max_steps):
            if f(hi) >= 0.0:
                return lo, hi
            lo, hi = hi, hi * factor
            if not math.isfinite(hi):
                break
    else:
        lo, hi = seed / factor, seed
        for _ in range(max_steps):
            if f(lo) <= 0.0:
                return lo, hi
            lo, hi = lo / factor, lo
            if lo == 0.0:
                break
    raise BracketError(
        f"no sign change found within {max_steps} geometric steps from seed {seed}"
    )


def solve_bracketed(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    *,
    rtol: float = 1e-12,
    max_iter: int = 300,
) -> float:
    """Root of f on [lo, hi] by bisection interleaved with secant steps.

    The endpoints must bracket a sign change. Alternating a bisection step
    with every secant step guarantees the interval halves at least every
    other iteration, so convergence to relative width rtol is certain; the
    secant steps supply the fast local refinement.
    """
    if lo > hi:
        lo, hi = hi, lo
    flo = f(lo)
    if flo == 0.0:
        return lo
    fhi = f(hi)
    if fhi == 0.0:
        return hi
    if (flo > 0.0) == (fhi > 0.0):
        raise BracketError(f"f({lo}) = {flo} and f({hi}) = {fhi} do not bracket a root")
    use_secant = True
    for _ in range(max_iter):
        scale = max(abs(lo), abs(hi))
        if hi - lo <= rtol * scale:
            break
        x = 0.0
        if use_secant and fhi != flo:
            x = hi - fhi * (hi - lo) / (fhi - flo)
        if not (lo < x < hi):
            x = 0.5 * (lo + hi)
        if x == lo or x == hi:
            break
        fx = f(x)
        if fx == 0.0:
            return x
        if (fx > 0.0) == (fhi > 0.0):
            hi, fhi = x, fx
        else:
            lo, flo = x, fx
        use_secant = not use_secant
    return 0.5 * (lo + hi)


def _simpson_panel(h: float, fa: float, fm: float, fb: float) -> float:
    return h * (fa + 4.0 * fm + fb) / 6.0


def _simpson_recurse(f, a, b, fa, fm, fb, whole, tol, depth):
    m = 0.5 * (a + b)
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = f(lm)
    frm = f(rm)
    left = _simpson_panel(m - a, fa, flm, fm)
    right = _simpson_panel(b - m, fm, frm, fb)
    delta = left + right - whole
    if abs(delta) <= 15.0 * tol:
        return left + right + delta / 15.0
    if depth <= 0:
        raise QuadratureError(
            f"adaptive quadrature stalled on [{a}, {b}]: refinement residual "
            f"{abs(delta):.3e} exceeds {15.0 * tol:.3e} at maximum depth"
        )
    return _simpson_recurse(f, a, m, fa, flm, fm, left, tol, depth - 1) + _simpson_recurse(
        f, m, b, fm, frm, fb, right, tol, depth - 1
    )


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    *,
    tol: float = 1e-10,
    max_depth: int = 60,
) -> float:
    """Integrate f over [a, b] with absolute tolerance tol per subinterval.

    Signed: a > b integrates with reversed orientation. Raises QuadratureError
    naming the offending subinterval if the recursion depth is exhausted.
    """
    if a == b:
        return 0.0
    sign = 1.0
    if a > b:
        a, b, sign = b, a, -1.0
    fa = f(a)
    fm = f(0.5 * (a + b))
    fb = f(b)
    whole = _simpson_panel(b - a, fa, fm, fb)
    return sign * _simpson_recurse(f, a, b, fa, fm, fb, whole, tol, max_depth)
