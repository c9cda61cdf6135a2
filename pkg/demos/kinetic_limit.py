"""Relaxing a kinetic density onto its equilibrium recovers the entropy solution.

As the relaxation time eps shrinks, the moment of the BGK-type density
approaches the exact shock. For a centred fan the equilibrium is already a
solution of the kinetic equation, so eps has no effect there.

Run: python demos/kinetic_limit.py
"""
from conslab.fixtures import get_fixture
from conslab.grid import GridFunction, l1_distance
from conslab.kinetic import VelocityGrid, kinetic_solve
from conslab.riemann import RiemannProblem, solve_riemann_convex

for name in ("burgers_shock", "exp_pair_riemann", "burgers_fan"):
    f = get_fixture(name)
    exact = solve_riemann_convex(RiemannProblem(f.fp, *f.riemann))
    u0 = f.initial(400)
    ref = GridFunction.from_callable(u0.grid, lambda x: exact(1.0, x))
    vg = VelocityGrid.covering(f.fp, 200)
    errs = [l1_distance(kinetic_solve(f.fp, u0, eps, 1.0, vg), ref) for eps in (1e-2, 3e-3, 1e-3)]
    print(f"{name:18s} L1 error at eps = 1e-2, 3e-3, 1e-3: " + ", ".join(f"{e:.4f}" for e in errs))
