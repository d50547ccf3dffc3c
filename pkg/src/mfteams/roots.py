"""Bracketed root finding with a short Newton polish."""

from __future__ import annotations

import math
from typing import Callable, Optional

Func = Callable[[float], float]


class BracketError(ValueError):
    pass


def expand_upper(f: Func, lo: float, hi: float, max_doublings: int = 200) -> float:
    """Double ``hi`` until ``f(hi)`` has the opposite sign of ``f(lo)``."""
    f_lo = f(lo)
    for _ in range(max_doublings):
        if f_lo * f(hi) <= 0:
            return hi
        hi *= 2.0
    raise BracketError(f"no sign change found above {lo}")


def bisect(f: Func, lo: float, hi: float, rtol: float = 1e-14, max_iter: int = 400) -> float:
    """Bisect until the bracket is narrower than ``rtol * (|lo| + |hi|)``."""
    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0:
        return lo
    if f_hi == 0:
        return hi
    if f_lo * f_hi > 0:
        raise BracketError(f"f({lo}) and f({hi}) share a sign")
    width = rtol * max(abs(lo) + abs(hi), math.ulp(1.0))
    for _ in range(max_iter):
        if hi - lo <= width:
            break
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if f_mid == 0:
            return mid
        if (f_mid < 0) == (f_lo < 0):
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
    return 0.5 * (lo + hi)


def find_root(
    f: Func,
    lo: float,
    hi: float,
    fprime: Optional[Func] = None,
    rtol: float = 1e-14,
    polish_steps: int = 3,
) -> float:
    """Root of ``f`` in ``[lo, hi]``: bisection, then up to three Newton steps.

    A Newton step is kept only if it stays inside the original bracket and
    does not increase ``|f|``.
    """
    x = bisect(f, lo, hi, rtol=rtol)
    if fprime is None:
        return x
    fx = f(x)
    for _ in range(polish_steps):
        d = fprime(x)
        if d == 0 or fx == 0:
            break
        cand = x - fx / d
        if not (lo <= cand <= hi):
            break
        f_cand = f(cand)
        if abs(f_cand) > abs(fx):
            break
        x, fx = cand, f_cand
    return x
