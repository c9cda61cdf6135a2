"""Named initial-data fixtures and exact candidates used by tests and the harness."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .flux import FluxPair, make_flux_pair
from .grid import Grid1D, GridFunction


def riemann_data(u_minus: float, u_plus: float, x0: float = 0.0):
    """Step equal to ``u_minus`` left of ``x0`` and ``u_plus`` right of it.

    A node sitting exactly on ``x0`` gets the mean state, so the sampled
    step is centred on ``x0`` rather than half a cell to one side.
    """
    def u0(x):
        x = np.asarray(x, dtype=float)
        return np.where(x < x0, u_minus, np.where(x > x0, u_plus, 0.5 * (u_minus + u_plus)))
    return u0


def oleinik_uq(q: float):
    """The one-parameter family of weak solutions of Burgers' Riemann problem (1, -1).

    For every ``q >= 1`` the function has jumps at ``(1-q)t/2``, ``0`` and
    ``(q-1)t/2``; ``q = 1`` is the entropy solution.
    Returns ``(evaluator, discontinuities)`` where each discontinuity is
    ``(u_minus, u_plus, speed)``.
    """
    if q < 1:
        raise ValueError("q must be at least 1")
    s = 0.5 * (q - 1.0)

    def u(t, x):
        x = np.asarray(x, dtype=float)
        out = np.where(x <= -s * t, 1.0, np.where(x <= 0, -q, np.where(x <= s * t, q, -1.0)))
        return out

    jumps = [(1.0, -q, -s), (-q, q, 0.0), (q, -1.0, s)] if q > 1 else [(1.0, -1.0, 0.0)]
    return u, jumps


def shock_candidate(u_minus: float, u_plus: float, speed: float, x0: float = 0.0):
    """Single jump moving at ``speed`` (need not satisfy any jump condition)."""
    def u(t, x):
        return np.where(np.asarray(x, dtype=float) <= x0 + speed * t, u_minus, u_plus)
    return u


def smooth_ramp(lo: float = -1.0, hi: float = 1.0, width: float = 1.0):
    """``x`` clipped to ``[lo, hi]`` scaled by ``width`` (piecewise linear ramp)."""
    def u0(x):
        return np.clip(np.asarray(x, dtype=float) / width, lo, hi)
    return u0


def smooth_distribution(center: float = 0.0, width: float = 0.5):
    """Smooth distribution function ``(1 + tanh((x - c)/w)) / 2`` with bounded derivatives."""
    def u0(x):
        return 0.5 * (1.0 + np.tanh((np.asarray(x, dtype=float) - center) / width))
    return u0


@dataclass(frozen=True)
class Fixture:
    name: str
    fp: FluxPair
    u0: Callable
    x_min: float
    x_max: float
    riemann: Optional[tuple] = None  # (u_minus, u_plus) when the data is a step

    def initial(self, n_cells: int) -> GridFunction:
        return GridFunction.from_callable(Grid1D(self.x_min, self.x_max, n_cells), self.u0)


def get_fixture(name: str) -> Fixture:
    burgers = make_flux_pair("burgers", (-1.0, 1.0))
    if name == "burgers_fan":
        return Fixture(name, burgers, riemann_data(-1.0, 1.0), -2.0, 2.0, (-1.0, 1.0))
    if name == "burgers_shock":
        return Fixture(name, burgers, riemann_data(1.0, -1.0), -2.0, 2.0, (1.0, -1.0))
    if name == "burgers_ramp":
        return Fixture(name, burgers, smooth_ramp(), -3.0, 3.0)
    if name == "exp_pair_riemann":
        return Fixture(name, make_flux_pair("exp_pair", (-1.0, 1.0)), riemann_data(0.5, -0.5),
                       -1.0, 3.0, (0.5, -0.5))
    if name == "ph_smooth_monotone":
        return Fixture(name, make_flux_pair("ph", (0.0, 1.0), phi_coeffs=[1.0, 1.0], mu=0.0),
                       smooth_distribution(0.0, 0.5), -3.0, 5.0)
    if name == "ph_step":
        return Fixture(name, make_flux_pair("ph", (0.0, 1.0), phi_coeffs=[1.0, 1.0], mu=0.0),
                       riemann_data(0.0, 1.0), -1.0, 3.0, (0.0, 1.0))
    raise KeyError(f"unknown fixture {name!r}")


FIXTURES = ("burgers_fan", "burgers_shock", "burgers_ramp", "exp_pair_riemann",
            "ph_smooth_monotone", "ph_step")
