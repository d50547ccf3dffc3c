"""Adaptive Simpson quadrature."""

from __future__ import annotations

import math
from typing import Callable

RTOL = 1e-10
ATOL = 1e-14
MAX_DEPTH = 60


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    rtol: float = RTOL,
    atol: float = ATOL,
    max_depth: int = MAX_DEPTH,
) -> float:
    """Integrate ``f`` over ``[a, b]`` with recursive Simpson bisection.

    The local acceptance test is ``|S_left + S_right - S_whole| <= 15 * tol``
    where the tolerance budget is halved at each split; accepted panels get
    the Richardson correction. ``rtol`` is taken relative to a coarse
    estimate of the whole integral.
    """
    if a == b:
        return 0.0
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) * (fa + 4.0 * fm + fb) / 6.0
    # a 5-point estimate is a safer scale than the 3-point one for peaked integrands
    q1, q3 = f(0.25 * (3 * a + b)), f(0.25 * (a + 3 * b))
    scale = abs((b - a) * (fa + 4 * q1 + 2 * fm + 4 * q3 + fb) / 12.0)
    tol = max(atol, rtol * scale)
    return _simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth)


def _simpson_step(f, a, b, fa, fm, fb, whole, tol, depth):
    m = 0.5 * (a + b)
    lm, rm = 0.5 * (a + m), 0.5 * (m + b)
    flm, frm = f(lm), f(rm)
    left = (m - a) * (fa + 4.0 * flm + fm) / 6.0
    right = (b - m) * (fm + 4.0 * frm + fb) / 6.0
    delta = left + right - whole
    if depth <= 0 or abs(delta) <= 15.0 * tol or not math.isfinite(delta):
        return left + right + delta / 15.0
    return _simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + _simpson_step(
        f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1
    )
