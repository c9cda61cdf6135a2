"""Level dynamics of the enterprise-distribution model and explicit conservative schemes.

The level system for ``u^n(t)``, the share of enterprises at levels up to
``n``, is

    h du^n/dt = -Phi(u^n) (u^n - u^{n-1}) + mu (u^{n+1} - u^n)

whose continuum limit is the law with ``eta' = 1/(Phi + mu)`` and
``phi' = (Phi - mu)/(Phi + mu)``. The upwind and Godunov schemes advance
``v = eta(u)`` through one shared flux-difference update, so the two
agree bit for bit whenever their interface fluxes do.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import (CflViolated, InsufficientRuns, NotConvex, RangeEscape,
                     WrongWindDirection)
from .flux import FluxPair, convexity_class
from .grid import Grid1D, GridFunction
from .metrics import estimate_order
from .stepping import march, record_times

RANGE_TOL = 1e-8
CFL_TOL = 1e-12


# ---- level system --------------------------------------------------------


@dataclass(frozen=True)
class PHConfig:
    """Parameters of the level system.

    Parameters
    ----------
    efficiency : callable
        ``Phi(u)``, positive on ``[0, 1]``.
    mu : float
        Attrition rate, non-negative.
    h : float
        Level spacing.
    n_range : (int, int)
        First and last simulated level; levels outside are frozen at 0 on
        the left and 1 on the right.
    t_final : float
    """

    efficiency: Callable
    mu: float
    h: float
    n_range: tuple
    t_final: float = 1.0

    def __post_init__(self):
        if self.mu < 0:
            raise ValueError("mu must be non-negative")
        if not self.h > 0:
            raise ValueError("h must be positive")
        n0, n1 = self.n_range
        if n1 < n0:
            raise ValueError("empty level range")
        phi = np.asarray(self.efficiency(np.linspace(0.0, 1.0, 1001)), dtype=float)
        if np.any(phi <= 0) or not np.all(np.isfinite(phi)):
            raise ValueError("efficiency must be positive and finite on [0, 1]")

    @property
    def levels(self) -> np.ndarray:
        return np.arange(self.n_range[0], self.n_range[1] + 1)

    @property
    def nodes(self) -> np.ndarray:
        return self.levels * self.h

    @classmethod
    def covering(cls, efficiency, mu, h, x_min, x_max, t_final=1.0) -> "PHConfig":
        """Levels ``n`` with ``nh`` inside ``[x_min, x_max]``."""
        return cls(efficiency, mu, h, (int(np.ceil(x_min / h - 1e-9)), int(np.floor(x_max / h + 1e-9))),
                   t_final)


@dataclass(frozen=True)
class LevelState:
    """Values ``u^n`` for consecutive levels starting at ``n_min``."""

    values: np.ndarray
    time: float = 0.0
    n_min: int = 0
    h: float = 1.0

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def x(self) -> np.ndarray:
        return (self.n_min + np.arange(self.values.size)) * self.h

    def is_monotone(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.diff(self.values) >= -tol))

    @classmethod
    def sample(cls, cfg: PHConfig, u0) -> "LevelState":
        """``u^n(0) = u0(nh)``."""
        return cls(np.asarray(u0(cfg.nodes), dtype=float), 0.0, int(cfg.n_range[0]), cfg.h)


def ph_rhs(cfg: PHConfig, state: LevelState) -> np.ndarray:
    """``du^n/dt`` with the neighbours outside the range fixed at 0 and 1.

    >>> cfg = PHConfig(lambda u: np.ones_like(u), 0.0, 1.0, (0, 0))
    >>> ph_rhs(cfg, LevelState([0.5]))
    array([-0.5])
    """
    return _ph_rhs_values(cfg, np.asarray(state.values, dtype=float))


def _ph_rhs_values(cfg: PHConfig, u: np.ndarray) -> np.ndarray:
    padded = np.concatenate(([0.0], u, [1.0]))
    left = u - padded[:-2]
    right = padded[2:] - u
    return (-cfg.efficiency(u) * left + cfg.mu * right) / cfg.h


def ph_time_step(cfg: PHConfig) -> float:
    """``h / (4 (max Phi + mu))`` with ``Phi`` sampled on ``[0, 1]``."""
    phi_max = float(np.max(cfg.efficiency(np.linspace(0.0, 1.0, 1001))))
    return cfg.h / (4.0 * (phi_max + cfg.mu))


def ph_trajectory(cfg: PHConfig, initial: LevelState, times=None) -> list:
    """Classical Runge-Kutta integration recording a state at each of ``times``."""
    ts = record_times(times, cfg.t_final)
    out = []

    def step(u, dt):
        k1 = _ph_rhs_values(cfg, u)
        k2 = _ph_rhs_values(cfg, u + 0.5 * dt * k1)
        k3 = _ph_rhs_values(cfg, u + 0.5 * dt * k2)
        k4 = _ph_rhs_values(cfg, u + dt * k3)
        u = u + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        if np.min(u) < -RANGE_TOL or np.max(u) > 1 + RANGE_TOL or not np.all(np.isfinite(u)):
            raise RangeEscape("a level share left [0, 1]")
        return u

    def record(u, t):
        out.append(LevelState(u.copy(), t, initial.n_min, initial.h))

    march(np.array(initial.values, dtype=float), step, ph_time_step(cfg), ts, record)
    return out


def ph_solve(cfg: PHConfig, initial: LevelState) -> LevelState:
    """Level shares at ``cfg.t_final``; leaving ``[0, 1]`` raises :class:`RangeEscape`."""
    if initial.values.size != cfg.levels.size:
        raise ValueError("initial state does not match the configured level range")
    return ph_trajectory(cfg, initial)[-1]


# ---- explicit conservative schemes ---------------------------------------


@dataclass(frozen=True)
class SchemeConfig:
    """Step sizes for the explicit schemes.

    ``tau`` defaults to ``cfl * h / max|a|``; a supplied ``tau`` is checked
    against the CFL limit.
    """

    tau: Optional[float] = None
    h: Optional[float] = None
    scheme: str = "upwind"
    cfl: float = 0.9

    def __post_init__(self):
        if self.scheme not in ("upwind", "godunov"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if not 0 < self.cfl <= 1:
            raise ValueError("cfl must lie in (0, 1]")


def _data_speeds(fp: FluxPair, u0: GridFunction):
    lo, hi = float(np.min(u0.values)), float(np.max(u0.values))
    s = fp.speed(np.linspace(lo, hi, 257))
    return float(np.min(s)), float(np.max(s))


def _resolve_steps(fp: FluxPair, u0: GridFunction, cfg: SchemeConfig, amax: float):
    h = u0.grid.dx
    if cfg.h is not None and abs(cfg.h - h) > 1e-12 * max(1.0, h):
        raise ValueError(f"configured h={cfg.h} differs from the grid spacing {h}")
    tau = cfg.tau if cfg.tau is not None else (cfg.cfl * h / amax if amax > 0 else h)
    if tau * amax / h > 1 + CFL_TOL:
        raise CflViolated(f"CFL number {tau * amax / h:.4g} exceeds 1")
    return h, tau


def _godunov_flux(fp: FluxPair, u_star: float):
    def flux(ul, ur):
        return np.maximum(fp.phi(np.maximum(ul, u_star)), fp.phi(np.minimum(ur, u_star)))
    return flux


def _upwind_flux(fp: FluxPair):
    def flux(ul, ur):
        return fp.phi(ul)
    return flux


def _conservative_run(fp: FluxPair, u0: GridFunction, tau: float, flux, times):
    """March ``v_i -= (tau/h) (F_{i+1/2} - F_{i-1/2})`` with constant ghost states."""
    dx = u0.grid.dx
    snaps = []

    def step(state, dt):
        u, v = state
        ext = np.concatenate(([u[0]], u, [u[-1]]))
        F = flux(ext[:-1], ext[1:])
        v = v - (dt / dx) * np.diff(F)
        return fp.eta_inverse(v), v

    def record(state, t):
        snaps.append(GridFunction(u0.grid, state[0], t))

    u = np.array(u0.values, dtype=float)
    march((u, np.asarray(fp.eta(u), dtype=float)), step, tau, times, record)
    return snaps


def _extend_right(u0: GridFunction, reach: float) -> GridFunction:
    """Pad ``u0`` on the right by ``reach`` (plus two cells) with its end value."""
    g = u0.grid
    extra = int(np.ceil(reach / g.dx)) + 2
    wide = Grid1D(g.x_min, g.x_min + (g.n_cells + extra) * g.dx, g.n_cells + extra)
    vals = np.concatenate((u0.values, np.full(extra, u0.values[-1])))
    return GridFunction(wide, vals, u0.time)


def _shift_back(snaps, s: float, grid: Grid1D):
    """``u(t, x) = w(t, x + s t)`` sampled on the original ``grid``."""
    out = []
    for w in snaps:
        vals = np.interp(grid.nodes + s * w.time, w.x, w.values)
        out.append(GridFunction(grid, vals, w.time))
    return out


def upwind_trajectory(fp: FluxPair, u0: GridFunction, cfg: SchemeConfig, t_final: float,
                      times=None, frame_speed=None) -> list:
    """Upwind snapshots at ``times`` and ``t_final``.

    The one-sided stencil needs ``a >= 0`` on the data range. With
    ``frame_speed="auto"`` (or a number ``s``) mixed-sign data are solved
    in the frame moving at ``-s``, where the flux is ``phi + s eta`` and the
    wind is non-negative, and the result is shifted back by ``s t``.
    """
    a_min, a_max = _data_speeds(fp, u0)
    s = 0.0
    if frame_speed == "auto":
        s = max(0.0, -a_min)
    elif frame_speed is not None:
        s = float(frame_speed)
    if a_min + s < -1e-12:
        raise WrongWindDirection(f"min characteristic speed {a_min + s:.4g} < 0")
    work = fp.with_frame_speed(s)
    amax = max(abs(a_min + s), abs(a_max + s))
    _, tau = _resolve_steps(work, u0, cfg, amax)
    ts = record_times(times, t_final)
    if not s:
        return _conservative_run(work, u0, tau, _upwind_flux(work), ts)
    # the co-moving grid must keep everything that is shifted back onto [x_min, x_max]
    wide = _extend_right(u0, s * float(ts[-1]))
    snaps = _conservative_run(work, wide, tau, _upwind_flux(work), ts)
    return _shift_back(snaps, s, u0.grid)


def upwind_solve(fp: FluxPair, u0: GridFunction, cfg: SchemeConfig, t_final: float,
                 frame_speed=None) -> GridFunction:
    """``eta(u_n^{m+1}) = eta(u_n^m) - (tau/h)(phi(u_n^m) - phi(u_{n-1}^m))``.

    Examples
    --------
    >>> from conslab.flux import make_flux_pair
    >>> g = Grid1D(0.0, 1.0, 10)
    >>> u0 = GridFunction(g, np.r_[np.ones(3), np.zeros(8)])
    >>> out = upwind_solve(make_flux_pair("linear", (0, 1)), u0, SchemeConfig(tau=0.1), 0.1)
    >>> out.values[:5].tolist()
    [1.0, 1.0, 1.0, 1.0, 0.0]
    """
    return upwind_trajectory(fp, u0, cfg, t_final, frame_speed=frame_speed)[-1]


def godunov_trajectory(fp: FluxPair, u0: GridFunction, cfg: SchemeConfig, t_final: float, times=None) -> list:
    if not convexity_class(fp).strictly_convex:
        raise NotConvex(f"{fp.name}: Godunov flux formula needs a convex Hamiltonian")
    a_min, a_max = _data_speeds(fp, u0)
    _, tau = _resolve_steps(fp, u0, cfg, max(abs(a_min), abs(a_max)))
    u_star = float(fp.speed_inverse(0.0))  # minimiser of phi on the domain
    return _conservative_run(fp, u0, tau, _godunov_flux(fp, u_star), record_times(times, t_final))


def godunov_solve(fp: FluxPair, u0: GridFunction, cfg: SchemeConfig, t_final: float) -> GridFunction:
    """Finite-volume update of ``eta(u)`` with the exact Riemann (Godunov) flux.

    For a convex Hamiltonian the interface flux is the minimum of ``phi``
    over the state interval when ``u_L <= u_R`` and the maximum otherwise,
    i.e. ``max(phi(max(u_L, u*)), phi(min(u_R, u*)))`` with ``u*`` the
    sonic state.
    """
    return godunov_trajectory(fp, u0, cfg, t_final)[-1]


# ---- convergence tables --------------------------------------------------


@dataclass(frozen=True)
class ConvergenceRow:
    h: float
    sup_err: float
    l1_err: float


@dataclass(frozen=True)
class ConvergenceReport:
    rows: tuple
    order_sup: float
    order_l1: float
    exclusion: float = 3.0

    def as_dict(self) -> dict:
        return {"rows": [{"h": r.h, "sup_err": r.sup_err, "l1_err": r.l1_err} for r in self.rows],
                "order_sup": self.order_sup, "order_l1": self.order_l1}

    def monotone_decay(self, key: str = "sup_err") -> bool:
        errs = [getattr(r, key) for r in self.rows]
        return all(b < a for a, b in zip(errs, errs[1:]))


def _nodes_values(run):
    return np.asarray(run.x, dtype=float), np.asarray(run.values, dtype=float)


def convergence_report(reference, runs, shocks=(), exclusion: float = 3.0) -> ConvergenceReport:
    """Error table and empirical orders for runs with decreasing ``h``.

    Parameters
    ----------
    reference : callable or sequence of callables
        ``reference(x)`` giving the comparison values at the run nodes; a
        sequence supplies one reference per run (for ``h``-dependent
        references such as a viscous solution with ``eps = h/2``).
    runs : sequence of (h, GridFunction or LevelState)
    shocks : sequence of float
        Shock locations; nodes within ``exclusion * h`` of one are left out
        of the sup norm (the L1 error uses every node).
    """
    runs = list(runs)
    if len(runs) < 3:
        raise InsufficientRuns("need at least three runs")
    hs = [float(h) for h, _ in runs]
    if any(b >= a for a, b in zip(hs, hs[1:])):
        raise InsufficientRuns("run spacings must be strictly decreasing")
    refs = list(reference) if isinstance(reference, (list, tuple)) else [reference] * len(runs)
    rows = []
    for (h, run), ref in zip(runs, refs):
        x, vals = _nodes_values(run)
        err = np.abs(vals - np.asarray(ref(x), dtype=float))
        keep = np.ones_like(x, dtype=bool)
        for xs in shocks:
            keep &= np.abs(x - xs) > exclusion * h
        sup = float(np.max(err[keep])) if np.any(keep) else 0.0
        l1 = float((np.sum(err) - 0.5 * (err[0] + err[-1])) * h)
        rows.append(ConvergenceRow(float(h), sup, l1))
    order_sup = estimate_order([(r.h, r.sup_err) for r in rows])
    order_l1 = estimate_order([(r.h, r.l1_err) for r in rows])
    return ConvergenceReport(tuple(rows), order_sup, order_l1, exclusion)
