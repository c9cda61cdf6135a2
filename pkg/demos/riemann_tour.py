"""Which discontinuities survive? Shock speeds and admissibility for a few jumps.

Run: python demos/riemann_tour.py
"""
from conslab.fixtures import oleinik_uq
from conslab.flux import make_flux_pair
from conslab.riemann import RiemannProblem, analyze_discontinuity

burgers = make_flux_pair("burgers", (-2.0, 2.0))
gelfand = make_flux_pair("gelfand_q", (0.0, 2.0))

print("A jump is a weak solution when it moves at the Rankine-Hugoniot speed;")
print("it is the physical one only when it also passes the entropy tests.\n")
for fp, left, right in ((burgers, 1.0, -1.0), (burgers, -1.0, 1.0), (burgers, 2.0, 0.0), (gelfand, 2.0, 0.0)):
    rep = analyze_discontinuity(RiemannProblem(fp, left, right))
    print(f"{fp.name:10s} {left:+.1f} -> {right:+.1f}: speed {rep.speed:+.4f}  "
          f"Lax {rep.satisfies_lax!s:5s}  E {rep.satisfies_e!s:5s}  witness {rep.violating_state}")

print("\nThe Oleinik family u_q is a weak solution for every q, but only some jumps are admissible:")
_, jumps = oleinik_uq(2.0)
for left, right, speed in jumps:
    rep = analyze_discontinuity(RiemannProblem(burgers, left, right))
    print(f"  jump {left:+.2f} -> {right:+.2f} at speed {speed:+.3f}: E condition {rep.satisfies_e}")
