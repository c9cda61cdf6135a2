"""BGK relaxation towards the signed indicator ``chi_u``.

Each velocity slice of ``f(t, x, v)`` is transported at its own speed
``a(v)`` and then relaxed towards ``chi`` of the local state::

    eta'(v) f_t + phi'(v) f_x = (chi_u(v) - f) / eps,   u = int f dv.

The equilibrium is averaged over each velocity cell, so the discrete
moment of ``chi_u`` is exactly ``u`` and the discrete maximum principle
holds without a quadrature error. The relaxation target is picked so
that the substep conserves ``int eta'(v) f dv = eta(u)`` exactly.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NonFinite, UnstableConfig
from .flux import FluxPair
from .grid import Grid1D, GridFunction
from .stepping import march, record_times


@dataclass(frozen=True)
class VelocityGrid:
    """``n_v`` velocity cells of width ``dv`` on ``[v_min, v_max]``."""

    v_min: float
    v_max: float
    n_v: int

    def __post_init__(self):
        if not self.v_min < self.v_max:
            raise ValueError("empty velocity range")
        if self.n_v < 16:
            raise ValueError("n_v must be at least 16")

    @property
    def dv(self) -> float:
        return (self.v_max - self.v_min) / self.n_v

    @property
    def edges(self) -> np.ndarray:
        return np.linspace(self.v_min, self.v_max, self.n_v + 1)

    @property
    def centers(self) -> np.ndarray:
        e = self.edges
        return 0.5 * (e[:-1] + e[1:])

    @classmethod
    def covering(cls, fp: FluxPair, n_v: int = 64) -> "VelocityGrid":
        """Grid over the hull of the domain and 0, padded by one cell each side."""
        a, b = fp.domain
        lo, hi = min(a, 0.0), max(b, 0.0)
        dv = (hi - lo) / (n_v - 2)
        return cls(lo - dv, hi + dv, n_v)

    def covers(self, fp: FluxPair) -> bool:
        a, b = fp.domain
        return self.v_min <= min(a, 0.0) and self.v_max >= max(b, 0.0)


@dataclass(frozen=True)
class KineticDensity:
    """Values ``f[i, j]`` at space node ``i`` and velocity cell ``j``."""

    x_grid: Grid1D
    v_grid: VelocityGrid
    values: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.x_grid.n_cells + 1, self.v_grid.n_v):
            raise ValueError(f"density shape {values.shape} does not match the grids")
        object.__setattr__(self, "values", values)


def chi(u, v):
    """``sign(u)`` where ``(u - v) v >= 0``, else 0.

    >>> chi(0.7, 0.3), chi(0.7, -0.2), chi(-0.5, -0.2)
    (1.0, 0.0, -1.0)
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    out = np.where((u - v) * v >= 0, np.sign(u), 0.0)
    return float(out) if out.ndim == 0 else out


def chi_cell_average(u, vg: VelocityGrid) -> np.ndarray:
    """Average of ``chi_u`` over each velocity cell, shape ``u.shape + (n_v,)``.

    It equals ``sign(u)`` times the fraction of the cell lying between 0
    and ``u``, so summing it times ``dv`` returns ``u`` exactly.
    """
    u = np.asarray(u, dtype=float)[..., None]
    e = vg.edges
    lo = np.minimum(u, 0.0)
    hi = np.maximum(u, 0.0)
    overlap = np.clip(np.minimum(hi, e[1:]) - np.maximum(lo, e[:-1]), 0.0, None)
    return np.sign(u) * overlap / vg.dv


def moment(f: KineticDensity) -> GridFunction:
    """Midpoint quadrature ``sum_j f[:, j] dv``."""
    return GridFunction(f.x_grid, np.sum(f.values, axis=1) * f.v_grid.dv, f.time)


def equilibrium(u0: GridFunction, vg: VelocityGrid) -> KineticDensity:
    return KineticDensity(u0.grid, vg, chi_cell_average(u0.values, vg), u0.time)


def _slice_coefficients(fp: FluxPair, vg: VelocityGrid):
    """Speed and relaxation weight ``1/eta'`` per velocity cell.

    Cells in the padding outside the flux domain use the nearest domain value.
    """
    a, b = fp.domain
    vc = np.clip(vg.centers, a, b)
    return np.asarray(fp.speed(vc), dtype=float), np.asarray(fp.eta_prime(vc), dtype=float)


def transport(f: np.ndarray, speeds: np.ndarray, lam: float) -> np.ndarray:
    """One upwind step per slice with ``lam = dt/dx``; end values are extended."""
    pos = np.maximum(speeds, 0.0)[None, :]
    neg = np.minimum(speeds, 0.0)[None, :]
    out = f.copy()
    d = np.diff(f, axis=0)
    out[1:] -= lam * pos * d
    out[:-1] -= lam * neg * d
    return out


def _decay(eta_prime: np.ndarray, eps: float, dt: float) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.exp(-dt / (eps * eta_prime))


def relax(f: np.ndarray, u: np.ndarray, vg: VelocityGrid, eta_prime: np.ndarray, eps: float, dt: float):
    """Exact solution of ``eta' f_t = (chi_u - f)/eps`` over ``dt`` with frozen ``u``."""
    eq = chi_cell_average(u, vg)
    return eq + (f - eq) * _decay(eta_prime, eps, dt)[None, :]


def conservative_state(f: np.ndarray, vg: VelocityGrid, eta_prime: np.ndarray, eps: float, dt: float):
    """State ``u*`` for which relaxing towards ``chi_{u*}`` keeps ``int eta' f dv``.

    The relaxation rate ``1/(eps eta'(v))`` varies with ``v``, so freezing
    ``u = int f dv`` drifts the conserved density whenever ``eta`` is
    nonlinear. The balance ``sum_j w_j chi_{u*}[j] = sum_j w_j f_j`` with
    ``w = eta' (1 - decay)`` is piecewise linear and increasing in ``u*``
    with kinks at the cell edges and 0, so it is inverted by interpolation.
    For constant ``eta'`` it reduces to ``u* = int f dv``.
    """
    w = eta_prime * (1.0 - _decay(eta_prime, eps, dt))
    knots = np.union1d(vg.edges, [0.0])
    balance = chi_cell_average(knots, vg) @ w
    return np.interp(f @ w, balance, knots)


@dataclass
class KineticRun:
    snapshots: list = field(default_factory=list)
    final_density: KineticDensity = None
    dt: float = 0.0
    n_steps: int = 0


def kinetic_run(fp: FluxPair, u0: GridFunction, eps: float, t_final: float, vg: VelocityGrid = None,
                cfl_safety: float = 0.9, times=None) -> KineticRun:
    """Split transport and relaxation from the equilibrium ``chi_{u0}``."""
    if not eps > 0:
        raise UnstableConfig("relaxation time must be positive")
    if not 0 < cfl_safety <= 1:
        raise UnstableConfig("upwind transport needs cfl_safety in (0, 1]")
    vg = vg or VelocityGrid.covering(fp)
    if not vg.covers(fp):
        raise ValueError("velocity grid must cover the flux domain and 0")
    speeds, ep = _slice_coefficients(fp, vg)
    amax = float(np.max(np.abs(speeds)))
    dx = u0.grid.dx
    run = KineticRun(dt=cfl_safety * dx / amax if amax > 0 else max(t_final, 1.0))
    lam_full = 1.0 / dx

    def step(f, dt):
        f = transport(f, speeds, dt * lam_full)
        u = conservative_state(f, vg, ep, eps, dt)
        f = relax(f, u, vg, ep, eps, dt)
        if not np.all(np.isfinite(f)):
            raise NonFinite("kinetic update produced non-finite values")
        run.n_steps += 1
        return f

    def record(f, t):
        run.snapshots.append(GridFunction(u0.grid, np.sum(f, axis=1) * vg.dv, t))
        run.final_density = KineticDensity(u0.grid, vg, f, t)

    f0 = chi_cell_average(u0.values, vg)
    march(f0, step, run.dt, record_times(times, t_final), record)
    return run


def kinetic_solve(fp: FluxPair, u0: GridFunction, eps: float, t_final: float,
                  vg: VelocityGrid = None, cfl_safety: float = 0.9) -> GridFunction:
    """Moment of the kinetic density at ``t_final``."""
    return kinetic_run(fp, u0, eps, t_final, vg, cfl_safety).snapshots[-1]
