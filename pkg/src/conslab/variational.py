"""Solutions from variational formulas for the potential ``U`` with ``U_x = eta(u)``.

The potential of the data is ``U0(x) = int_0^x eta(u0)``. With ``H = phi o eta^-1``
convex and ``L`` its conjugate, the minimal potential is

    U(t, x) = min_y [ U0(y) + t L((x - y)/t) ]

and the solution is ``u = eta^-1(G((x - y*)/t))`` with ``G`` the inverse of the
characteristic speed. The same object is reached here four ways: the direct
minimisation above, the conjugate (Hopf) formula for convex ``U0``, the
envelope of straight characteristics, and a sup formula for monotone data.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (NoCharacteristicHits, NonFiniteFunctional, NotConvex,
                     NotConvexInitial, NotMonotoneData)
from .flux import FluxPair, convexity_class, legendre_conjugate
from .grid import GridFunction, SampledFunction
from .quadrature import golden_section_min

N_SCAN = 512
REFINE_TOL = 1e-10
CONVEX_TOL = 1e-10
SNAP = 1e-3  # cells


@dataclass(frozen=True)
class Potential:
    """A potential ``U(t, x)`` together with the formula that produced it."""

    evaluator: Callable
    provenance: str

    def __call__(self, t, x):
        return self.evaluator(t, x)


@dataclass(frozen=True)
class MinimizerRecord:
    t: float
    x: float
    y_star: float
    value: float
    unique_within: float  # gap to the second-best local minimum of the scan


def _require_convex(fp: FluxPair):
    if not convexity_class(fp).strictly_convex:
        raise NotConvex(f"{fp.name}: Hamiltonian is not strictly convex")


# ---- initial potential ---------------------------------------------------


@dataclass(frozen=True)
class InitialPotential:
    """Exact integral of the piecewise-linear density, extended linearly beyond the grid.

    Inside cell ``[x_i, x_i + dx]`` the value is
    ``U_i + d_i s + (d_{i+1} - d_i) s^2 / (2 dx)`` with ``s = y - x_i``, so
    the potential is piecewise quadratic with a continuous slope.
    """

    nodes: np.ndarray
    values: np.ndarray
    density: np.ndarray

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        x, d = self.nodes, self.density
        dx = x[1] - x[0]
        i = np.clip(np.floor((y - x[0]) / dx).astype(int), 0, x.size - 2)
        s = y - x[i]
        out = self.values[i] + d[i] * s + (d[i + 1] - d[i]) * s * s / (2 * dx)
        out = np.where(y < x[0], self.values[0] + d[0] * (y - x[0]), out)
        return np.where(y > x[-1], self.values[-1] + d[-1] * (y - x[-1]), out)

    def sampled(self) -> SampledFunction:
        return SampledFunction(self.nodes, self.values)


def _initial_potential(fp: FluxPair, u0: GridFunction, integrand: str = "eta") -> InitialPotential:
    if integrand not in ("eta", "raw"):
        raise ValueError(f"integrand must be 'eta' or 'raw', got {integrand!r}")
    x = u0.x
    dens = np.asarray(fp.eta(u0.values) if integrand == "eta" else u0.values, dtype=float)
    cum = np.concatenate(([0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * np.diff(x))))
    cum -= cum[int(np.argmin(np.abs(x)))]
    return InitialPotential(x, cum, dens)


def potential_initial(fp: FluxPair, u0: GridFunction) -> SampledFunction:
    """Trapezoid cumulative integral of ``eta(u0)``, zero at the node nearest 0.

    Examples
    --------
    >>> from conslab.flux import make_flux_pair
    >>> from conslab.grid import Grid1D
    >>> g = Grid1D(-1.0, 1.0, 20)
    >>> U0 = potential_initial(make_flux_pair("burgers", (-1, 1)), GridFunction(g, np.full(21, 0.5)))
    >>> round(float(U0(1.0)), 12)
    0.5
    """
    return _initial_potential(fp, u0).sampled()


# ---- Lax-Oleinik minimisation -------------------------------------------


@dataclass(frozen=True)
class MinimizationResult:
    """Vectorised output of :func:`lax_oleinik_grid`."""

    t: float
    x: np.ndarray
    u: np.ndarray
    y_star: np.ndarray
    value: np.ndarray
    unique_within: np.ndarray

    def record(self, i: int) -> MinimizerRecord:
        return MinimizerRecord(self.t, float(self.x[i]), float(self.y_star[i]),
                               float(self.value[i]), float(self.unique_within[i]))


def _speed_window(fp: FluxPair, u0: GridFunction):
    lo, hi = float(np.min(u0.values)), float(np.max(u0.values))
    s = fp.speed(np.linspace(lo, hi, 257))
    return float(np.min(s)), float(np.max(s))


def _minimize(fp, U0, t, x, a_min, a_max, pad, n_scan):
    """Minimise ``U0(y) + t L((x - y)/t)`` for every ``x`` in a 1-D array."""
    x = np.asarray(x, dtype=float)
    lo = x - t * a_max - pad
    hi = x - t * a_min + pad
    frac = np.linspace(0.0, 1.0, n_scan)
    ys = lo[:, None] + (hi - lo)[:, None] * frac[None, :]

    def functional(y, xq):
        return U0(y) + t * fp.lagrangian((xq - y) / t)

    vals = functional(ys, x[:, None])
    if not np.all(np.isfinite(vals)):
        raise NonFiniteFunctional("Lax-Oleinik functional is not finite on the window")
    k = np.argmin(vals, axis=1)  # first index wins ties
    rows = np.arange(x.size)
    step = (hi - lo) / (n_scan - 1)
    a = np.maximum(ys[rows, k] - step, lo)
    b = np.minimum(ys[rows, k] + step, hi)
    y_ref, f_ref = golden_section_min(lambda y: functional(y, x), a, b, tol=REFINE_TOL)
    scan_best = vals[rows, k]
    better = f_ref < scan_best
    y_star = np.where(better, y_ref, ys[rows, k])
    value = np.where(better, f_ref, scan_best)
    gap = _second_minimum_gap(vals, k)
    return y_star, value, gap


def _second_minimum_gap(vals, k):
    inner = (vals[:, 1:-1] <= vals[:, :-2]) & (vals[:, 1:-1] <= vals[:, 2:])
    local = np.zeros_like(vals, dtype=bool)
    local[:, 1:-1] = inner
    local[:, 0] = vals[:, 0] <= vals[:, 1]
    local[:, -1] = vals[:, -1] <= vals[:, -2]
    idx = np.arange(vals.shape[1])[None, :]
    far = np.abs(idx - k[:, None]) > 1
    cand = np.where(local & far, vals, np.inf)
    best = vals[np.arange(vals.shape[0]), k]
    return np.min(cand, axis=1) - best


def _clamp_to_minimiser_cell(u, u0: GridFunction, y_star, monotone_map: bool):
    """Clamp ``u`` to the data values on the cells around each minimiser.

    At a minimiser ``U0'(y*) = L'((x - y*)/t)``, and ``U0'`` interpolates the
    nodal densities linearly, so ``u`` lies between the data values at the
    nodes bracketing ``y*``. The search locates ``y*`` only to about the
    square root of the rounding level, which near ``t = 0`` is amplified by
    ``1/t``; the clamp removes that excursion. Cells within ``SNAP`` cells
    of ``y*`` are included to cover the location error.
    """
    if not monotone_map:
        return u
    g = u0.grid
    vals = u0.values
    pos = (np.asarray(y_star, dtype=float) - g.x_min) / g.dx
    i_lo = np.clip(np.floor(pos - SNAP).astype(int), 0, g.n_cells)
    i_hi = np.clip(np.ceil(pos + SNAP).astype(int), 0, g.n_cells)
    lo = np.array([vals[a:b + 1].min() for a, b in zip(i_lo, i_hi)])
    hi = np.array([vals[a:b + 1].max() for a, b in zip(i_lo, i_hi)])
    return np.clip(u, lo, hi)


def lax_oleinik_grid(fp: FluxPair, u0: GridFunction, t: float, x, integrand: str = "eta",
                     n_scan: int = N_SCAN) -> MinimizationResult:
    """Solution by the Lax-Oleinik formula at every query point ``x``.

    The minimisation window is ``[x - t max a - 2dx, x - t min a + 2dx]``
    with the speeds taken over the data range; a scan of ``n_scan`` points
    is refined by golden-section search to 1e-10. The smallest minimiser of
    the scan is kept on ties.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    _require_convex(fp)
    U0 = _initial_potential(fp, u0, integrand)
    a_min, a_max = _speed_window(fp, u0)
    xq = np.atleast_1d(np.asarray(x, dtype=float))
    y_star, value, gap = _minimize(fp, U0, t, xq, a_min, a_max, 2 * u0.grid.dx, n_scan)
    v = fp.eta(fp.speed_inverse((xq - y_star) / t))
    u = _clamp_to_minimiser_cell(fp.eta_inverse(v), u0, y_star, integrand == "eta")
    return MinimizationResult(float(t), xq, np.atleast_1d(u), y_star, value, gap)


def lax_oleinik(fp: FluxPair, u0: GridFunction, t: float, x: float, integrand: str = "eta"):
    """``(u(t, x), MinimizerRecord)`` from the Lax-Oleinik formula."""
    res = lax_oleinik_grid(fp, u0, t, [x], integrand)
    return float(res.u[0]), res.record(0)


def lax_oleinik_solution(fp: FluxPair, u0: GridFunction, t: float, integrand: str = "eta") -> GridFunction:
    res = lax_oleinik_grid(fp, u0, t, u0.x, integrand)
    return GridFunction(u0.grid, res.u, t)


# ---- Hopf formulas -------------------------------------------------------


def _check_convex_samples(U0: SampledFunction):
    x, y = U0.grid, U0.values
    slopes = np.diff(y) / np.diff(x)
    if np.any(np.diff(slopes) < -CONVEX_TOL * (1.0 + np.max(np.abs(slopes)))):
        raise NotConvexInitial("initial potential has a negative second difference")


def hopf_convex_initial(fp: FluxPair, U0: SampledFunction, t: float, x, n_s: int = 2001):
    """``U(t, x) = max_s [s x - t H(s) - U0*(s)]`` for convex ``U0``.

    ``s`` runs over ``n_s`` points of ``[eta(a), eta(b)]`` and ``U0*`` is the
    discrete conjugate over the samples of ``U0``.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    _check_convex_samples(U0)
    lo, hi = fp.eta_range
    s = np.linspace(lo, hi, n_s)
    conj = legendre_conjugate(U0, s).values
    ham = fp.phi(fp.eta_inverse(s))
    xq = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.max(s[None, :] * xq[:, None] - t * ham[None, :] - conj[None, :], axis=1)
    return float(out[0]) if np.ndim(x) == 0 else out


def hopf_lax_convex_h(fp: FluxPair, u0: GridFunction, t: float, x):
    """Minimal potential ``min_y [U0(y) + t L((x - y)/t)]``.

    Examples
    --------
    >>> from conslab.flux import make_flux_pair
    >>> from conslab.grid import Grid1D
    >>> g = Grid1D(-2.0, 2.0, 400)
    >>> u0 = GridFunction.from_callable(g, np.sign)
    >>> abs(hopf_lax_convex_h(make_flux_pair("burgers", (-1, 1)), u0, 1.0, 0.0)) < 1e-12
    True
    """
    if not t > 0:
        raise ValueError("t must be positive")
    U0 = _initial_potential(fp, u0)
    xq = np.atleast_1d(np.asarray(x, dtype=float))
    a = fp.speed(np.linspace(*fp.domain, 257))
    if np.ptp(a) <= 1e-12 * (1.0 + np.max(np.abs(a))):
        # linear H: L is the indicator of {c}, so the potential is transported
        value = U0(xq - t * float(a[0]))
        return float(value[0]) if np.ndim(x) == 0 else value
    _require_convex(fp)
    a_min, a_max = _speed_window(fp, u0)
    _, value, _ = _minimize(fp, U0, t, xq, a_min, a_max, 2 * u0.grid.dx, N_SCAN)
    return float(value[0]) if np.ndim(x) == 0 else value


def _solution_from_potential(fp: FluxPair, potential, u0: GridFunction, t: float) -> GridFunction:
    """``u = eta^-1(dU/dx)`` by central differences over half a cell."""
    x = u0.x
    half = 0.5 * u0.grid.dx
    p = (potential(t, x + half) - potential(t, x - half)) / (2 * half)
    lo, hi = fp.eta_range
    return GridFunction(u0.grid, fp.eta_inverse(np.clip(p, lo, hi)), t)


def hopf_lax_solution(fp: FluxPair, u0: GridFunction, t: float) -> GridFunction:
    return _solution_from_potential(fp, lambda tt, xx: hopf_lax_convex_h(fp, u0, tt, xx), u0, t)


# ---- characteristics -----------------------------------------------------


def _launches(fp: FluxPair, u0: GridFunction, t: float):
    """Launch points with sub-launches wherever the speed jumps within a cell.

    ``eta(u0)`` is treated as piecewise linear, so ``U0`` is exactly
    quadratic between nodes. Data are extended by constants far enough
    that every query on the grid is reached.
    """
    a_min, a_max = _speed_window(fp, u0)
    dx = u0.grid.dx
    reach = t * max(abs(a_min), abs(a_max)) + 2 * dx
    n_ext = int(np.ceil(reach / dx))
    x = np.concatenate((u0.x[0] - dx * np.arange(n_ext, 0, -1), u0.x,
                        u0.x[-1] + dx * np.arange(1, n_ext + 1)))
    v = np.asarray(fp.eta(u0.values), dtype=float)
    v = np.concatenate((np.full(n_ext, v[0]), v, np.full(n_ext, v[-1])))
    speeds = fp.speed(fp.eta_inverse(v))
    # rays launched within one cell land at most dx/2 apart
    m = np.clip(np.ceil(2 * t * np.abs(np.diff(speeds)) / dx), 1, 4096).astype(int)
    cell = np.repeat(np.arange(m.size), m)
    offs = np.arange(cell.size) - np.repeat(np.cumsum(m) - m, m)
    theta = offs / np.repeat(m, m)
    x0 = np.append(x[cell] + theta * dx, x[-1])
    v0 = np.append(v[cell] + theta * (v[cell + 1] - v[cell]), v[-1])
    # exact integral of the piecewise linear density from the grid origin
    c_nodes = np.concatenate(([0.0], np.cumsum(0.5 * (v[1:] + v[:-1]) * dx)))
    c_nodes -= c_nodes[n_ext + int(np.argmin(np.abs(u0.x)))]
    c_cell = np.append(c_nodes[cell] + dx * (theta * v[cell] + 0.5 * theta**2 * (v[cell + 1] - v[cell])),
                       c_nodes[-1])
    return x0, v0, c_cell


def characteristics_potential(fp: FluxPair, u0: GridFunction, t: float, x):
    """Minimum over straight characteristics of the potential carried along them.

    Along the ray from ``x0`` with state ``u0(x0)`` the potential grows at
    the constant rate ``eta(u) a(u) - phi(u)``. Between consecutive rays the
    carried values are interpolated linearly; the minimum over every pair
    of consecutive rays bracketing ``x`` is returned.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    _require_convex(fp)
    x0, v0, U0 = _launches(fp, u0, t)
    u_launch = fp.eta_inverse(v0)
    a = fp.speed(u_launch)
    X = x0 + t * a
    Phi = U0 + t * (v0 * a - fp.phi(u_launch))
    xq = np.atleast_1d(np.asarray(x, dtype=float))
    order = np.argsort(xq, kind="stable")
    xs = xq[order]
    lo = np.minimum(X[:-1], X[1:])
    hi = np.maximum(X[:-1], X[1:])
    i_lo = np.searchsorted(xs, lo, side="left")
    i_hi = np.searchsorted(xs, hi, side="right")
    counts = np.maximum(i_hi - i_lo, 0)
    seg = np.repeat(np.arange(lo.size), counts)
    q = np.repeat(i_lo, counts) + (np.arange(seg.size) - np.repeat(np.cumsum(counts) - counts, counts))
    width = X[seg + 1] - X[seg]
    safe = np.where(width == 0, 1.0, width)
    lam = np.where(width == 0, 0.0, (xs[q] - X[seg]) / safe)
    val = Phi[seg] + lam * (Phi[seg + 1] - Phi[seg])
    val = np.where(width == 0, np.minimum(Phi[seg], Phi[seg + 1]), val)
    out = np.full(xs.size, np.inf)
    np.minimum.at(out, q, val)
    if np.any(~np.isfinite(out)):
        raise NoCharacteristicHits("query point outside the reach of the launched characteristics")
    res = np.empty_like(out)
    res[order] = out
    return float(res[0]) if np.ndim(x) == 0 else res


def characteristics_solution(fp: FluxPair, u0: GridFunction, t: float) -> GridFunction:
    return _solution_from_potential(fp, lambda tt, xx: characteristics_potential(fp, u0, tt, xx), u0, t)


# ---- monotone data -------------------------------------------------------


def _monotone_conjugate(U0: InitialPotential, p) -> np.ndarray:
    """``sup_y [p y - U0(y)]`` for a nondecreasing density, in closed form.

    The sup sits where the interpolated density crosses ``p``; on a flat
    cell every point of the cell attains it.
    """
    p = np.asarray(p, dtype=float)
    x, d = U0.nodes, U0.density
    dx = x[1] - x[0]
    i = np.clip(np.searchsorted(d, p, side="right") - 1, 0, x.size - 2)
    rise = d[i + 1] - d[i]
    with np.errstate(divide="ignore", invalid="ignore"):
        frac = np.where(rise > 0, np.clip((p - d[i]) / rise, 0.0, 1.0), 0.0)
    y = x[i] + frac * dx
    return p * y - U0(y)


def hopf_monotone(fp: FluxPair, u0: GridFunction, t: float, x, n_s: int = N_SCAN,
                  s_variable: str = "u"):
    """Solution for nondecreasing data from a sup over states ``s``.

    For each ``s`` between the limits ``u-`` and ``u+`` the objective is
    ``-sup_y int_0^y (p(s) - q(u0)) + p(s) x - t phi(eta^-1(p(s)))``.
    With ``s_variable="u"`` (default) ``p = eta(s)``, ``q = eta`` and the
    answer is the maximiser ``s`` itself. With ``"printed"`` ``p = s``,
    ``q`` is the identity and the answer is ``eta^-1`` of the maximiser.
    The scan is refined by golden-section search; ties go to the
    smallest ``s``.
    """
    if s_variable not in ("u", "printed"):
        raise ValueError(f"s_variable must be 'u' or 'printed', got {s_variable!r}")
    if not t > 0:
        raise ValueError("t must be positive")
    vals = u0.values
    if np.any(np.diff(vals) < -1e-12):
        raise NotMonotoneData("initial data must be nondecreasing")
    u_lo, u_hi = float(vals[0]), float(vals[-1])
    xq = np.atleast_1d(np.asarray(x, dtype=float))
    if u_hi == u_lo:
        out = np.full(xq.size, u_lo)
        return float(out[0]) if np.ndim(x) == 0 else out
    if s_variable == "u":
        U0 = _initial_potential(fp, u0, "eta")
        p_of = fp.eta
        ham = fp.phi
        finish = lambda s: s  # noqa: E731
    else:
        U0 = _initial_potential(fp, u0, "raw")
        p_of = lambda s: np.asarray(s, dtype=float)  # noqa: E731
        ham = lambda s: fp.phi(fp.eta_inverse(s))  # noqa: E731
        finish = fp.eta_inverse

    def objective(s, xx, inner=None):
        s = np.asarray(s, dtype=float)
        p = p_of(s)
        if inner is None:
            inner = _monotone_conjugate(U0, p)
        return -inner + p * xx - t * ham(s)

    s_grid = np.linspace(u_lo, u_hi, n_s)
    inner_grid = _monotone_conjugate(U0, p_of(s_grid))
    scan = objective(s_grid[None, :], xq[:, None], inner_grid[None, :])
    k = np.argmax(scan, axis=1)
    step = s_grid[1] - s_grid[0]
    a = np.maximum(s_grid[k] - step, u_lo)
    b = np.minimum(s_grid[k] + step, u_hi)
    s_ref, f_ref = golden_section_min(lambda s: -objective(s, xq), a, b, tol=REFINE_TOL)
    best = scan[np.arange(xq.size), k]
    s_star = np.where(-f_ref > best, s_ref, s_grid[k])
    out = np.atleast_1d(finish(s_star))
    return float(out[0]) if np.ndim(x) == 0 else out


def hopf_monotone_solution(fp: FluxPair, u0: GridFunction, t: float, s_variable: str = "u") -> GridFunction:
    return GridFunction(u0.grid, hopf_monotone(fp, u0, t, u0.x, s_variable=s_variable), t)


def make_potential(method: str, fp: FluxPair, u0: GridFunction) -> Potential:
    """Wrap one of the potential formulas as a :class:`Potential`."""
    if method == "hopf_lax":
        return Potential(lambda t, x: hopf_lax_convex_h(fp, u0, t, x), "min_y U0(y) + tL((x-y)/t)")
    if method == "characteristics":
        return Potential(lambda t, x: characteristics_potential(fp, u0, t, x), "characteristics envelope")
    if method == "hopf":
        U0 = potential_initial(fp, u0)
        return Potential(lambda t, x: hopf_convex_initial(fp, U0, t, x), "max_s sx - tH(s) - U0*(s)")
    raise ValueError(f"unknown potential method {method!r}")
