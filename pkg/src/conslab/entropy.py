"""Weak-form and Kruzhkov entropy residuals, and the certificate sweep built on them.

A candidate ``u(t, x)`` is tested against smooth non-negative bumps ``f``:

    weak      :  int int  eta(u) f_t + phi(u) f_x
    kruzhkov  :  int int  |eta(u) - eta(k)| f_t + sign(u - k) (phi(u) - phi(k)) f_x  >= 0

Both integrals use tensor midpoint quadrature over the bump support.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import OutOfInterval, SupportEscape
from .flux import FluxPair
from .grid import GridFunction, l1_distance
from .quadrature import adaptive_simpson

QUAD_N = 256
BUDGET_FACTOR = 10.0


def bump(s):
    """``exp(-1/(1 - s^2))`` inside ``|s| < 1``, zero outside."""
    s = np.asarray(s, dtype=float)
    inside = np.abs(s) < 1
    out = np.zeros_like(s)
    out[inside] = np.exp(-1.0 / (1.0 - s[inside] ** 2))
    return out


def bump_prime(s):
    s = np.asarray(s, dtype=float)
    inside = np.abs(s) < 1
    out = np.zeros_like(s)
    si = s[inside]
    out[inside] = np.exp(-1.0 / (1.0 - si**2)) * (-2.0 * si / (1.0 - si**2) ** 2)
    return out


@dataclass(frozen=True)
class TestFunction:
    """Tensor bump centred at ``(t0, x0)`` with half-widths ``(r_t, r_x)``."""

    __test__ = False  # not a pytest class

    t0: float
    x0: float
    r_t: float
    r_x: float

    def __post_init__(self):
        if not (self.r_t > 0 and self.r_x > 0):
            raise ValueError("radii must be positive")

    @property
    def support_measure(self) -> float:
        return 4.0 * self.r_t * self.r_x

    def values(self, t, x):
        """``(f, f_t, f_x)`` at the given points."""
        st = (np.asarray(t, dtype=float) - self.t0) / self.r_t
        sx = (np.asarray(x, dtype=float) - self.x0) / self.r_x
        bt, bx = bump(st), bump(sx)
        return bt * bx, bump_prime(st) / self.r_t * bx, bt * bump_prime(sx) / self.r_x

    def nodes(self, quad_n: int):
        """Midpoint nodes and the cell area of the ``quad_n x quad_n`` rule."""
        k = (np.arange(quad_n) + 0.5) / quad_n
        t = self.t0 - self.r_t + 2 * self.r_t * k
        x = self.x0 - self.r_x + 2 * self.r_x * k
        T, X = np.meshgrid(t, x, indexing="ij")
        return T, X, self.support_measure / quad_n**2


@dataclass(frozen=True)
class CandidateSolution:
    """A bounded function ``u(t, x)`` on ``[t_min, t_max] x [x_min, x_max]``."""

    evaluator: Callable
    t_window: tuple
    x_window: tuple
    bounds: Optional[tuple] = None

    def __call__(self, t, x):
        return self.evaluator(t, x)

    @classmethod
    def from_snapshots(cls, snapshots) -> "CandidateSolution":
        """Linear interpolation in ``t`` and ``x`` between grid snapshots."""
        snaps = sorted(snapshots, key=lambda s: s.time)
        times = np.array([s.time for s in snaps])
        if np.any(np.diff(times) <= 0):
            raise ValueError("snapshot times must be distinct")
        grid = snaps[0].grid
        if any(s.grid != grid for s in snaps):
            raise ValueError("snapshots must share one grid")
        table = np.stack([s.values for s in snaps])
        nodes = grid.nodes

        def evaluator(t, x):
            t = np.asarray(t, dtype=float)
            x = np.asarray(x, dtype=float)
            j = np.clip(np.searchsorted(times, t, side="right") - 1, 0, max(len(times) - 2, 0))
            if len(times) == 1:
                return np.interp(x, nodes, table[0])
            w = np.clip((t - times[j]) / (times[j + 1] - times[j]), 0.0, 1.0)
            pos = np.clip((x - nodes[0]) / grid.dx, 0, grid.n_cells)
            i = np.minimum(pos.astype(int), grid.n_cells - 1)
            frac = pos - i
            lo = table[j, i] * (1 - frac) + table[j, i + 1] * frac
            hi = table[j + 1, i] * (1 - frac) + table[j + 1, i + 1] * frac
            return lo * (1 - w) + hi * w

        return cls(evaluator, (float(times[0]), float(times[-1])), (grid.x_min, grid.x_max),
                   (float(table.min()), float(table.max())))

    @classmethod
    def from_function(cls, func, t_window, x_window, bounds=None) -> "CandidateSolution":
        return cls(func, tuple(t_window), tuple(x_window), bounds)


def _sample(cand: CandidateSolution, tf: TestFunction, quad_n: int):
    t_lo, t_hi = cand.t_window
    x_lo, x_hi = cand.x_window
    slack = 1e-12
    if (tf.t0 - tf.r_t < max(t_lo, 0.0) - slack or tf.t0 + tf.r_t > t_hi + slack
            or tf.x0 - tf.r_x < x_lo - slack or tf.x0 + tf.r_x > x_hi + slack
            or tf.t0 - tf.r_t <= 0):
        raise SupportEscape("test function support leaves the candidate window")
    T, X, area = tf.nodes(quad_n)
    _, ft, fx = tf.values(T, X)
    u = np.asarray(cand(T, X), dtype=float)
    return u, ft, fx, area


def weak_residual(fp: FluxPair, cand: CandidateSolution, tf: TestFunction, quad_n: int = QUAD_N) -> float:
    """``int int eta(u) f_t + phi(u) f_x`` by tensor midpoint quadrature."""
    u, ft, fx, area = _sample(cand, tf, quad_n)
    return float(np.sum(fp.eta(u) * ft + fp.phi(u) * fx) * area)


def kruzhkov_residual(fp: FluxPair, cand: CandidateSolution, tf: TestFunction, entropy_level: float,
                      quad_n: int = QUAD_N) -> float:
    """Kruzhkov integral for one constant ``k``; non-negative for an entropy solution."""
    return float(kruzhkov_residuals(fp, cand, tf, [entropy_level], quad_n)[0])


def kruzhkov_residuals(fp: FluxPair, cand: CandidateSolution, tf: TestFunction, levels,
                       quad_n: int = QUAD_N) -> np.ndarray:
    """Kruzhkov integrals for several ``k`` sharing one sampling of ``u``."""
    u, ft, fx, area = _sample(cand, tf, quad_n)
    eu, pu = fp.eta(u).ravel(), fp.phi(u).ravel()
    ft, fx, u = ft.ravel(), fx.ravel(), u.ravel()
    k = np.asarray(levels, dtype=float)
    ek, pk = fp.eta(k)[:, None], fp.phi(k)[:, None]
    integrand = np.abs(eu[None, :] - ek) * ft[None, :] + np.sign(u[None, :] - k[:, None]) * (pu[None, :] - pk) * fx[None, :]
    return np.sum(integrand, axis=1) * area


def quadrature_budget(tf: TestFunction, quad_n: int = QUAD_N) -> float:
    """Allowed negative residual ``10 * (support measure) / quad_n``."""
    return BUDGET_FACTOR * tf.support_measure / quad_n


def bump_lattice(t_window, x_window, n_t: int = 4, n_x: int = 8, scales=(1.0, 2.0)) -> list:
    """Deterministic placements: ``n_t x n_x`` centres for each radius scale.

    At scale ``s`` the radii are ``s/(2 n_t)`` of the time span and
    ``s/n_x`` of the space span. Centres are spread so every support stays
    inside the window; the space radius exceeds the centre spacing, so
    every point of the window sits well inside some support.
    """
    t_lo, t_hi = t_window
    x_lo, x_hi = x_window
    out = []
    for s in scales:
        r_t = s * (t_hi - t_lo) / (2.0 * n_t)
        r_x = s * (x_hi - x_lo) / n_x
        for tc in np.linspace(t_lo + r_t * 1.001, t_hi - r_t * 1.001, n_t):
            for xc in np.linspace(x_lo + r_x * 1.001, x_hi - r_x * 1.001, n_x):
                out.append(TestFunction(float(tc), float(xc), r_t, r_x))
    return out


@dataclass
class Certificate:
    """Outcome of the ``(k, bump)`` sweep."""

    weak_worst: float
    weak_worst_budget_ratio: float
    kruzhkov_worst: float
    worst_level: float
    worst_bump: TestFunction
    worst_budget: float
    passed: bool
    n_checks: int = 0
    violations: list = field(default_factory=list)

    def as_dict(self) -> dict:
        b = self.worst_bump
        return {
            "weak": self.weak_worst,
            "kruzhkov": {"k": self.worst_level, "residual": self.kruzhkov_worst, "budget": self.worst_budget,
                         "placement": {"t0": b.t0, "x0": b.x0, "r_t": b.r_t, "r_x": b.r_x}},
            "checks": self.n_checks,
            "pass": self.passed,
        }


def entropy_certificate(fp: FluxPair, cand: CandidateSolution, levels=None, lattice=None,
                        quad_n: int = QUAD_N) -> Certificate:
    """Kruzhkov sweep over a 33-point ``k``-grid and the bump lattice.

    Passes when every residual is at least minus the quadrature budget of
    its bump. The worst weak residual is reported alongside.
    """
    if levels is None:
        lo, hi = cand.bounds if cand.bounds is not None else fp.domain
        levels = np.linspace(lo, hi, 33)
    levels = np.asarray(levels, dtype=float)
    lattice = lattice if lattice is not None else bump_lattice(
        (max(cand.t_window[0], 1e-9), cand.t_window[1]), cand.x_window)
    worst = (np.inf, None, None, None)
    weak_worst, weak_ratio = 0.0, 0.0
    violations = []
    for tf in lattice:
        budget = quadrature_budget(tf, quad_n)
        res = kruzhkov_residuals(fp, cand, tf, levels, quad_n)
        j = int(np.argmin(res))
        if res[j] < worst[0]:
            worst = (float(res[j]), float(levels[j]), tf, budget)
        for idx in np.flatnonzero(res < -budget):
            violations.append((float(levels[idx]), tf, float(res[idx])))
        w = weak_residual(fp, cand, tf, quad_n)
        if abs(w) > abs(weak_worst):
            weak_worst = w
        weak_ratio = max(weak_ratio, abs(w) / budget)
    return Certificate(weak_worst, weak_ratio, worst[0], worst[1], worst[2], worst[3],
                       not violations, len(lattice) * levels.size, violations)


def entropy_decomposition_check(Phi, interval, u: float, dPhi=None, d2Phi=None, rtol: float = 1e-12):
    """Both sides of the ``|u - k|`` representation of a smooth ``Phi`` on ``[a, b]``.

    ``rhs = 1/2 int_a^b |u - k| Phi''(k) dk + 1/2 (Phi'(a) + Phi'(b)) u
    + 1/2 (Phi(a) + Phi(b) - a Phi'(a) - b Phi'(b))``; returns ``(Phi(u), rhs)``.
    Missing derivatives are taken from fourth-order central differences.

    >>> lhs, rhs = entropy_decomposition_check(lambda u: u * u, (-1.0, 1.0), 0.5)
    >>> round(lhs, 12), round(rhs, 9)
    (0.25, 0.25)
    """
    a, b = (float(v) for v in interval)
    if not a < u < b:
        raise OutOfInterval(f"u={u} must lie strictly inside ({a}, {b})")
    step = 1e-3 * max(1.0, b - a)
    if dPhi is None:
        def dPhi(s):
            return (-Phi(s + 2 * step) + 8 * Phi(s + step) - 8 * Phi(s - step) + Phi(s - 2 * step)) / (12 * step)
    if d2Phi is None:
        def d2Phi(s):
            return (-Phi(s + 2 * step) + 16 * Phi(s + step) - 30 * Phi(s) + 16 * Phi(s - step)
                    - Phi(s - 2 * step)) / (12 * step**2)

    def weight(k):
        return abs(u - k) * float(d2Phi(k))

    # split at the kink of |u - k|
    integral = adaptive_simpson(weight, a, u, rtol) + adaptive_simpson(weight, u, b, rtol)
    da, db = float(dPhi(a)), float(dPhi(b))
    rhs = 0.5 * integral + 0.5 * (da + db) * u + 0.5 * (float(Phi(a)) + float(Phi(b)) - a * da - b * db)
    return float(Phi(u)), float(rhs)


def change_of_variables_check(fp: FluxPair, u0: GridFunction, method: str, t: float, **knobs) -> float:
    """``|| eta(u(t)) - v(t) ||_1`` between the law for ``u`` and its form in ``v = eta(u)``.

    The ``v``-problem has identity density and flux ``H = phi o eta^-1``
    and starts from ``eta(u0)``.
    """
    from .methods import run_method

    u_t = run_method(method, fp, u0, t, **knobs)[-1]
    cf = fp.conservative_form()
    v0 = GridFunction(u0.grid, fp.eta(u0.values), u0.time)
    v_t = run_method(method, cf, v0, t, **knobs)[-1]
    return l1_distance(GridFunction(u0.grid, fp.eta(u_t.values), t), v_t)


def initial_trace_distances(cand: CandidateSolution, u0, x, times=(0.05, 0.025, 0.0125)) -> list:
    """L1 distance between ``u(t, .)`` and ``u0`` on nodes ``x`` for shrinking ``t``."""
    x = np.asarray(x, dtype=float)
    dx = x[1] - x[0]
    target = np.asarray(u0(x), dtype=float)
    out = []
    for t in times:
        d = np.abs(np.asarray(cand(np.full_like(x, t), x), dtype=float) - target)
        out.append(float((np.sum(d) - 0.5 * (d[0] + d[-1])) * dx))
    return out
