"""One entry point per solution method, all returning snapshot lists on the input grid."""
from __future__ import annotations

import numpy as np

from .flux import FluxPair
from .grid import GridFunction
from .kinetic import VelocityGrid, kinetic_run
from .schemes import (LevelState, PHConfig, SchemeConfig, godunov_trajectory, ph_trajectory,
                      upwind_trajectory)
from .stepping import record_times
from .variational import (characteristics_solution, hopf_lax_solution, hopf_monotone_solution,
                          lax_oleinik_solution)
from .viscous import ViscousConfig, viscous_run

TIME_MARCHING = ("viscous", "kinetic", "godunov", "upwind", "ph")
VARIATIONAL = ("laxoleinik", "hopf_lax", "characteristics", "monotone")
METHODS = TIME_MARCHING + VARIATIONAL


def _epsilon(value, dx: float) -> float:
    """Viscosity knob: a number, or ``"h/2"``-style multiples of the grid spacing."""
    if isinstance(value, str):
        num, _, den = value.partition("/")
        if num.strip() != "h":
            raise ValueError(f"cannot read viscosity {value!r}")
        return dx / float(den) if den else dx
    return float(value)


def run_method(method: str, fp: FluxPair, u0: GridFunction, t_final: float, times=None, **knobs) -> list:
    """Snapshots of ``method`` at ``times`` and ``t_final``.

    Knobs per method: ``viscous`` (epsilon, form, cfl_safety, dissipation),
    ``kinetic`` (eps, n_v with default ``max(64, n_cells/2)``, cfl_safety), ``upwind`` (cfl, frame_speed),
    ``godunov`` (cfl), ``laxoleinik`` (integrand), ``monotone`` (s_variable),
    ``ph`` (no knobs; needs a ``ph`` flux pair and a grid aligned with the
    levels).
    """
    ts = record_times(times, t_final)
    dx = u0.grid.dx
    if method == "viscous":
        cfg = ViscousConfig(_epsilon(knobs.get("epsilon", "h/2"), dx), knobs.get("form", "plain"),
                            float(t_final), float(knobs.get("cfl_safety", 0.45)),
                            dissipation=knobs.get("dissipation", "adaptive"))
        return viscous_run(fp, u0, cfg, ts).snapshots
    if method == "kinetic":
        # velocity cells refine with the space grid, else the fan stays quantised at O(dv)
        n_v = knobs.get("n_v", "auto")
        n_v = max(64, u0.grid.n_cells // 2) if n_v == "auto" else int(n_v)
        vg = VelocityGrid.covering(fp, n_v)
        return kinetic_run(fp, u0, float(knobs.get("eps", 1e-3)), float(t_final), vg,
                           float(knobs.get("cfl_safety", 0.9)), ts).snapshots
    if method == "godunov":
        return godunov_trajectory(fp, u0, SchemeConfig(cfl=float(knobs.get("cfl", 0.9)), scheme="godunov"),
                                  float(t_final), ts)
    if method == "upwind":
        return upwind_trajectory(fp, u0, SchemeConfig(cfl=float(knobs.get("cfl", 0.9))), float(t_final), ts,
                                 frame_speed=knobs.get("frame_speed", "auto"))
    if method == "ph":
        return _ph_snapshots(fp, u0, ts)
    solvers = {
        "laxoleinik": lambda t: lax_oleinik_solution(fp, u0, t, knobs.get("integrand", "eta")),
        "hopf_lax": lambda t: hopf_lax_solution(fp, u0, t),
        "characteristics": lambda t: characteristics_solution(fp, u0, t),
        "monotone": lambda t: hopf_monotone_solution(fp, u0, t, knobs.get("s_variable", "u")),
    }
    if method not in solvers:
        raise ValueError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")
    return [GridFunction(u0.grid, u0.values, 0.0) if t == 0 else solvers[method](float(t)) for t in ts]


def _ph_snapshots(fp: FluxPair, u0: GridFunction, ts) -> list:
    if fp.name != "ph":
        raise ValueError("the level system needs a 'ph' flux pair")
    h = u0.grid.dx
    n_min = u0.grid.x_min / h
    if abs(n_min - round(n_min)) > 1e-9:
        raise ValueError("grid nodes must sit on multiples of the level spacing")
    n_min = int(round(n_min))
    Phi = fp.params["Phi"]
    cfg = PHConfig(Phi, float(fp.params.get("mu", 0.0)), h, (n_min, n_min + u0.grid.n_cells), float(ts[-1]))
    states = ph_trajectory(cfg, LevelState(np.asarray(u0.values), 0.0, n_min, h), ts)
    return [GridFunction(u0.grid, s.values, s.time) for s in states]
