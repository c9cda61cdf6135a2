"""Telling the entropy solution from an impostor with Kruzhkov test functions.

Both the expanding fan and the stationary jump from -1 to 1 solve Burgers'
equation weakly. Sweeping |u - k| entropies against a lattice of smooth bumps
separates them: the jump produces entropy of the wrong sign.

Run: python demos/entropy_certificates.py
"""
import numpy as np

from conslab.entropy import CandidateSolution, entropy_certificate
from conslab.fixtures import shock_candidate
from conslab.flux import make_flux_pair

fp = make_flux_pair("burgers", (-1.0, 1.0))
window = ((0.0, 1.2), (-2.0, 2.0))
candidates = {
    "fan": lambda t, x: np.clip(x / np.maximum(t, 1e-12), -1.0, 1.0),
    "stationary jump": shock_candidate(-1.0, 1.0, 0.0),
}
for name, u in candidates.items():
    cert = entropy_certificate(fp, CandidateSolution.from_function(u, *window, (-1.0, 1.0)))
    print(f"{name:16s} weak residual {cert.weak_worst:+.2e}  worst Kruzhkov {cert.kruzhkov_worst:+.3e} "
          f"(k = {cert.worst_level:+.2f}, budget {cert.worst_budget:.1e})  -> "
          f"{'accepted' if cert.passed else 'rejected'}")
