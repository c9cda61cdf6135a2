"""Numerical lab for scalar conservation laws ``eta(u)_t + phi(u)_x = 0``.

Every solution concept (vanishing viscosity, Lax-Oleinik and Hopf
formulas, characteristics, BGK kinetic relaxation, Godunov and upwind
schemes, the level system of an industry model) has its own solver; the
harness cross-validates them in L1 and the entropy verifier checks the
Kruzhkov inequalities on their output.
"""
from .errors import ConsLabError
from .flux import FluxPair, convexity_class, legendre_conjugate, make_flux_pair
from .grid import Grid1D, GridFunction, SampledFunction, l1_distance, sup_distance
from .metrics import estimate_order
from .riemann import (RiemannProblem, analyze_discontinuity, check_e_condition, check_lax,
                      rh_speed, solve_riemann_convex)
from .viscous import ViscousConfig, solve_viscous, viscous_run
from .variational import (characteristics_solution, hopf_convex_initial, hopf_lax_solution,
                          hopf_monotone_solution, lax_oleinik_solution)
from .kinetic import VelocityGrid, chi, kinetic_solve, moment
from .schemes import (PHConfig, LevelState, SchemeConfig, convergence_report, godunov_solve,
                      ph_solve, upwind_solve)
from .entropy import CandidateSolution, entropy_certificate, kruzhkov_residual, weak_residual
from .methods import METHODS, run_method
from .harness import ExperimentConfig, ComparisonReport, load_config, run_experiment

__version__ = "0.1.0"
