import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conslab.errors import UnstableConfig
from conslab.fixtures import get_fixture, riemann_data
from conslab.flux import make_flux_pair
from conslab.grid import Grid1D, GridFunction, l1_distance
from conslab.kinetic import (KineticDensity, VelocityGrid, chi, chi_cell_average, conservative_state,
                             kinetic_run, kinetic_solve, moment, relax)
from conslab.riemann import RiemannProblem, solve_riemann_convex


def _single_node_density(values, vg):
    return KineticDensity(Grid1D(0.0, 1.0, 8), vg, np.tile(values, (9, 1)))


def _riemann_error(fp, left, right, eps, n_cells=400, n_v=64, t=1.0):
    grid = Grid1D(-2.0, 2.0, n_cells)
    u0 = GridFunction.from_callable(grid, riemann_data(left, right))
    exact = solve_riemann_convex(RiemannProblem(fp, left, right))
    u = kinetic_solve(fp, u0, eps, t, VelocityGrid.covering(fp, n_v))
    return l1_distance(u, GridFunction.from_callable(grid, lambda x: exact(t, x)))


@pytest.mark.parametrize("u, v, expected", [(0.7, 0.3, 1.0), (0.7, -0.2, 0.0), (-0.5, -0.2, -1.0)])
def test_chi_examples(u, v, expected):
    assert chi(u, v) == expected


def test_chi_vanishes_outside_zero_to_u():
    v = np.linspace(-1, 1, 41)
    out = chi(0.4, v)
    assert np.all(out[(v < 0) | (v > 0.4)] == 0)
    assert np.all(out[(v >= 0) & (v <= 0.4)] == 1)


@pytest.mark.parametrize("u", [0.6, -0.4])
def test_moment_of_sampled_chi(u):
    vg = VelocityGrid(-1.0, 1.0, 2000)
    f = _single_node_density(chi(u, vg.centers), vg)
    assert abs(moment(f).values[0] - u) <= vg.dv


def test_moment_of_zero_density():
    vg = VelocityGrid(-1.0, 1.0, 64)
    assert moment(_single_node_density(np.zeros(64), vg)).values[0] == 0.0


def test_moment_identity_on_cell_averages():
    vg = VelocityGrid.covering(make_flux_pair("burgers", (-1.0, 1.0)), 64)
    us = np.linspace(-1.0, 1.0, 101)
    assert np.allclose(chi_cell_average(us, vg).sum(axis=1) * vg.dv, us, atol=1e-13)


def test_velocity_grid_rules(burgers):
    with pytest.raises(ValueError):
        VelocityGrid(-1.0, 1.0, 8)
    assert VelocityGrid.covering(burgers, 64).covers(burgers)
    assert not VelocityGrid(0.0, 1.0, 32).covers(burgers)


def test_rejects_nonpositive_eps(burgers):
    u0 = GridFunction.from_callable(Grid1D(-1, 1, 20), np.zeros_like)
    with pytest.raises(UnstableConfig):
        kinetic_solve(burgers, u0, 0.0, 0.1)


def test_rejects_grid_not_covering(burgers):
    u0 = GridFunction.from_callable(Grid1D(-1, 1, 20), np.zeros_like)
    with pytest.raises(ValueError):
        kinetic_solve(burgers, u0, 1e-3, 0.1, VelocityGrid(0.0, 1.0, 32))


@pytest.mark.parametrize("c", [-0.7, 0.0, 0.35])
def test_constant_data_is_steady(burgers, c):
    vg = VelocityGrid.covering(burgers, 64)
    u0 = GridFunction.from_callable(Grid1D(-1, 1, 80), lambda x: np.full_like(x, c))
    u = kinetic_solve(burgers, u0, 1e-3, 0.7, vg)
    assert np.max(np.abs(u.values - c)) <= vg.dv


def test_burgers_fan_matches_rarefaction(burgers):
    assert _riemann_error(burgers, -1.0, 1.0, 1e-3) <= 0.05


def test_burgers_shock_stays_at_origin(burgers):
    grid = Grid1D(-2.0, 2.0, 400)
    u = kinetic_solve(burgers, GridFunction.from_callable(grid, riemann_data(1.0, -1.0)), 1e-3, 1.0)
    x, v = grid.nodes, u.values
    k = int(np.argmax(v < 0))
    x_s = x[k - 1] + (x[k] - x[k - 1]) * v[k - 1] / (v[k - 1] - v[k])
    assert abs(x_s) <= 2 * grid.dx


@pytest.mark.parametrize("name", ["burgers_shock", "exp_pair_riemann"])
def test_eps_refinement_decreases_shock_error(name):
    f = get_fixture(name)
    exact = solve_riemann_convex(RiemannProblem(f.fp, *f.riemann))
    u0 = f.initial(400)
    ref = GridFunction.from_callable(u0.grid, lambda x: exact(1.0, x))
    errs = [l1_distance(kinetic_solve(f.fp, u0, eps, 1.0, VelocityGrid.covering(f.fp, 200)), ref)
            for eps in (1e-2, 3e-3, 1e-3)]
    assert errs[0] > errs[1] > errs[2]


def test_fan_is_insensitive_to_eps(burgers):
    # the chi-equilibrium of a centred fan is an exact solution of the free transport
    errs = [_riemann_error(burgers, -1.0, 1.0, eps, n_cells=200) for eps in (1e-2, 3e-3, 1e-3)]
    assert max(errs) - min(errs) < 0.1 * min(errs)


def test_density_bounded_by_one(burgers):
    u0 = GridFunction.from_callable(Grid1D(-2, 2, 200), lambda x: np.sin(3 * x))
    run = kinetic_run(burgers, u0, 3e-3, 1.0, VelocityGrid.covering(burgers, 64))
    assert np.max(np.abs(run.final_density.values)) <= 1.0 + 1e-12
    assert run.n_steps > 0


def test_exp_pair_conserves_eta(burgers):
    fp = make_flux_pair("exp_pair", (-1.0, 1.0))
    grid = Grid1D(-3.0, 3.0, 300)
    u0 = GridFunction.from_callable(grid, lambda x: 0.5 * np.exp(-4 * x * x))
    run = kinetic_run(fp, u0, 1e-3, 0.5, VelocityGrid.covering(fp, 128), times=[0.0, 0.5])
    mass = [np.sum(fp.eta(s.values)) * grid.dx for s in run.snapshots]
    assert abs(mass[1] - mass[0]) < 2e-3 * abs(mass[0])


_densities = st.lists(st.floats(-1, 1), min_size=32, max_size=32).map(np.array)


@given(_densities, st.sampled_from([1e-3, 1e-2, 1.0]))
def test_relaxation_contracts_towards_equilibrium(f, eps):
    fp = make_flux_pair("exp_pair", (-1.0, 1.0))
    vg = VelocityGrid.covering(fp, 32)
    ep = fp.eta_prime(np.clip(vg.centers, -1, 1))
    u = conservative_state(f[None, :], vg, ep, eps, 0.01)
    eq = chi_cell_average(u, vg)
    g = relax(f[None, :], u, vg, ep, eps, 0.01)
    assert np.max(np.abs(g - eq)) <= np.max(np.abs(f - eq)) + 1e-15
    assert np.max(np.abs(g)) <= 1.0 + 1e-12


@given(_densities, st.sampled_from([1e-4, 1e-2, 1.0]))
def test_relaxation_conserves_eta_moment(f, eps):
    fp = make_flux_pair("exp_pair", (-1.0, 1.0))
    vg = VelocityGrid.covering(fp, 32)
    ep = fp.eta_prime(np.clip(vg.centers, -1, 1))
    f = f[None, :]
    g = relax(f, conservative_state(f, vg, ep, eps, 0.01), vg, ep, eps, 0.01)
    assert np.allclose(g @ ep, f @ ep, atol=1e-12)


@given(_densities)
def test_conservative_state_is_the_moment_for_linear_eta(f):
    vg = VelocityGrid(-1.0625, 1.0625, 32)
    u = conservative_state(f[None, :], vg, np.ones(32), 1e-3, 0.01)
    expected = np.clip(np.sum(f) * vg.dv, -1.0625, 1.0625)
    assert np.allclose(u, expected, atol=1e-12)
