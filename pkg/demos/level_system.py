"""A system of ODEs for the level positions converges to the PDE solution.

The level system tracks where the solution crosses each level h, 2h, ...
Refining h drives its error against the exact smooth solution down at first
order.

Run: python demos/level_system.py
"""
import numpy as np

from conslab.fixtures import get_fixture
from conslab.metrics import estimate_order
from conslab.methods import run_method
from conslab.riemann import solve_smooth_convex

f = get_fixture("ph_smooth_monotone")
rows = []
for h in (0.04, 0.02, 0.01):
    u0 = f.initial(int(round((f.x_max - f.x_min) / h)))
    u = run_method("ph", f.fp, u0, 1.0)[-1]
    err = float(np.max(np.abs(u.values - solve_smooth_convex(f.fp, f.u0, 1.0, u0.x))))
    rows.append((h, err))
    print(f"h = {h:.2f}: sup error {err:.3e}")
print(f"observed order {estimate_order(rows):.2f}")
