"""Scalar quadrature and root-finding helpers used across modules."""
from __future__ import annotations

import math

import numpy as np

from .errors import NotBracketed

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def adaptive_simpson(f, a: float, b: float, rtol: float = 1e-10, max_depth: int = 50,
                     min_width: float = 1e-4) -> float:
    """Integrate a scalar function on ``[a, b]`` by adaptive Simpson.

    Subintervals are split until the Richardson estimate falls below
    ``rtol`` times the magnitude of the running estimate (with an absolute
    floor tied to the interval length). Subintervals narrower than
    ``min_width * (b - a)`` are not split again: with a noisy integrand
    (e.g. finite-difference derivatives) the estimate never settles and
    the recursion would otherwise grow like ``2**max_depth``.
    """
    if a == b:
        return 0.0
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    scale = max(abs(whole), abs(b - a) * max(abs(fa), abs(fm), abs(fb)), 1e-300)
    tol = rtol * scale
    floor = min_width * abs(b - a)

    def recurse(a, fa, m, fm, b, fb, whole, tol, depth):
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
        right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
        delta = left + right - whole
        if depth <= 0 or abs(delta) <= 15.0 * tol or abs(b - a) <= floor:
            return left + right + delta / 15.0
        return recurse(a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1) + recurse(
            m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1
        )

    return recurse(a, fa, 0.5 * (a + b), fm, b, fb, whole, tol, max_depth)


def bisect_monotone(f, y, lo, hi, rtol: float = 1e-12, max_iter: int = 200):
    """Vectorised bisection solving ``f(x) = y`` for strictly monotone ``f``.

    ``y`` may be an array; ``lo`` and ``hi`` are scalars or broadcastable
    arrays bracketing every root. Iterates until the bracket stops
    shrinking in floating point, so the residual is at rounding level.
    """
    y = np.asarray(y, dtype=float)
    lo = np.broadcast_to(np.asarray(lo, dtype=float), y.shape).copy()
    hi = np.broadcast_to(np.asarray(hi, dtype=float), y.shape).copy()
    flo = np.asarray(f(lo), dtype=float) - y
    fhi = np.asarray(f(hi), dtype=float) - y
    tol = rtol * (1.0 + np.abs(y))
    if np.any((flo > tol) & (fhi > tol)) or np.any((flo < -tol) & (fhi < -tol)):
        raise NotBracketed("target value lies outside the image of the bracket")
    increasing = np.asarray(f(hi), dtype=float) >= np.asarray(f(lo), dtype=float)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if np.all((mid == lo) | (mid == hi)):
            break
        fm = np.asarray(f(mid), dtype=float) - y
        go_right = np.where(increasing, fm < 0.0, fm > 0.0)
        lo = np.where(go_right, mid, lo)
        hi = np.where(go_right, hi, mid)
    # pick whichever bracket end has the smaller residual
    rlo = np.abs(np.asarray(f(lo), dtype=float) - y)
    rhi = np.abs(np.asarray(f(hi), dtype=float) - y)
    x = np.where(rlo <= rhi, lo, hi)
    return x if x.ndim else float(x)


def golden_section_min(func, lo, hi, tol: float = 1e-10, max_iter: int = 200):
    """Vectorised golden-section search for a minimiser on ``[lo, hi]``.

    ``func`` maps an array of abscissae (same shape as ``lo``) to values.
    Returns ``(x_min, f_min)``.
    """
    lo = np.asarray(lo, dtype=float).copy()
    hi = np.asarray(hi, dtype=float).copy()
    c = hi - _GOLDEN * (hi - lo)
    d = lo + _GOLDEN * (hi - lo)
    fc, fd = func(c), func(d)
    for _ in range(max_iter):
        if np.all(hi - lo <= tol):
            break
        left = fc <= fd
        hi = np.where(left, d, hi)
        lo = np.where(left, lo, c)
        new_c = hi - _GOLDEN * (hi - lo)
        new_d = lo + _GOLDEN * (hi - lo)
        # reuse the surviving interior point, evaluate one fresh point per lane
        c_next = np.where(left, new_c, d)
        d_next = np.where(left, c, new_d)
        fresh = np.where(left, c_next, d_next)
        f_fresh = func(fresh)
        fc_next = np.where(left, f_fresh, fd)
        fd_next = np.where(left, fc, f_fresh)
        c, d, fc, fd = c_next, d_next, fc_next, fd_next
    x = np.where(fc <= fd, c, d)
    fx = np.minimum(fc, fd)
    return x, fx
