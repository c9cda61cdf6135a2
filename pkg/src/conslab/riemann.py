"""Shock speeds, admissibility tests and exact self-similar solutions.

These closed forms serve as the oracles the numerical solvers are checked
against.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DegenerateStates, NonPositiveWeight, NotConvex, OutOfDomain
from .flux import FluxPair, convexity_class
from .quadrature import adaptive_simpson, bisect_monotone

LAX_TOL = 1e-12
E_TOL = 1e-10


@dataclass(frozen=True)
class RiemannProblem:
    fp: FluxPair
    u_minus: float
    u_plus: float

    def __post_init__(self):
        a, b = self.fp.domain
        for u in (self.u_minus, self.u_plus):
            if not (a - 1e-12 <= u <= b + 1e-12):
                raise OutOfDomain(f"state {u} outside [{a}, {b}]")


@dataclass(frozen=True)
class DiscontinuityReport:
    speed: float
    satisfies_rh: bool
    satisfies_e: bool
    satisfies_lax: bool
    violating_state: Optional[float] = None
    admissible_interval: Optional[tuple] = None

    def as_dict(self) -> dict:
        return {
            "speed": self.speed,
            "lax": self.satisfies_lax,
            "e_condition": self.satisfies_e,
            "witness": self.violating_state,
            "admissible_interval": list(self.admissible_interval) if self.admissible_interval else None,
        }


def rh_speed(rp: RiemannProblem) -> float:
    """Jump speed ``[phi] / [eta]`` of the discontinuity joining the two states."""
    if rp.u_minus == rp.u_plus:
        raise DegenerateStates("left and right states coincide")
    fp = rp.fp
    return float((fp.phi(rp.u_plus) - fp.phi(rp.u_minus)) / (fp.eta(rp.u_plus) - fp.eta(rp.u_minus)))


def chord_speed(fp: FluxPair, u_left, u):
    """``sigma(u_left, u)``, vectorised over ``u``."""
    u = np.asarray(u, dtype=float)
    return (fp.phi(u) - fp.phi(u_left)) / (fp.eta(u) - fp.eta(u_left))


def check_lax(rp: RiemannProblem) -> bool:
    k = rh_speed(rp)
    a_plus = float(rp.fp.speed(rp.u_plus))
    a_minus = float(rp.fp.speed(rp.u_minus))
    return bool(a_plus + LAX_TOL < k < a_minus - LAX_TOL)


def check_e_condition(rp: RiemannProblem, n_samples: int = 101):
    """Oleinik chord condition on ``n_samples`` interior states.

    The condition is ``sigma(u_minus, u_plus) <= sigma(u_minus, u)`` for every
    ``u`` strictly between the states. Returns ``(ok, witness)`` where
    ``witness`` is the first sampled state (walking from ``u_minus`` towards
    ``u_plus``) at which the inequality fails by more than 1e-10.
    """
    if n_samples < 3:
        raise ValueError("need at least 3 samples")
    k = rh_speed(rp)
    frac = np.arange(1, n_samples + 1) / (n_samples + 1)
    u = rp.u_minus + (rp.u_plus - rp.u_minus) * frac
    sigma = chord_speed(rp.fp, rp.u_minus, u)
    # chord from u_minus must not be slower than the jump, for either ordering
    bad = k > sigma + E_TOL
    idx = np.flatnonzero(bad)
    if idx.size:
        return False, float(u[idx[0]])
    return True, None


def _require_convex(fp: FluxPair):
    if not convexity_class(fp).strictly_convex:
        raise NotConvex(f"{fp.name}: Hamiltonian is not strictly convex")


def admissible_speed_interval(rp: RiemannProblem) -> tuple:
    """Open interval of speeds reachable by multiplying the law by a positive weight.

    Returned as ``(lo, hi)``; for a compressive jump this is
    ``(a(u_plus), a(u_minus))``.
    """
    _require_convex(rp.fp)
    lo, hi = sorted((float(rp.fp.speed(rp.u_plus)), float(rp.fp.speed(rp.u_minus))))
    return lo, hi


def weighted_form_speed(rp: RiemannProblem, f_prime, rtol: float = 1e-10) -> float:
    """Jump speed of the law multiplied by ``psi = f'/eta'``.

    ``k = int a(u) f'(u) du / int f'(u) du`` over the state interval.
    ``f_prime`` must be positive inside the interval (it may vanish at an
    endpoint).
    """
    if rp.u_minus == rp.u_plus:
        raise DegenerateStates("left and right states coincide")
    lo, hi = sorted((rp.u_minus, rp.u_plus))
    inner = np.linspace(lo, hi, 203)[1:-1]
    w = np.asarray(f_prime(inner), dtype=float) * np.ones_like(inner)
    if np.any(w <= 0) or np.any(np.asarray(f_prime(np.array([lo, hi]))) < 0):
        raise NonPositiveWeight("weight f' must be positive on the state interval")
    fp = rp.fp
    num = adaptive_simpson(lambda u: float(fp.speed(u) * f_prime(u)), rp.u_minus, rp.u_plus, rtol)
    den = adaptive_simpson(lambda u: float(f_prime(u)), rp.u_minus, rp.u_plus, rtol)
    return num / den


@dataclass(frozen=True)
class Wave:
    kind: str  # "shock" | "rarefaction"
    left: float
    right: float
    speed_left: float
    speed_right: float


@dataclass(frozen=True)
class SelfSimilarSolution:
    fp: FluxPair
    u_minus: float
    u_plus: float
    waves: tuple = field(default_factory=tuple)

    def __call__(self, t, x):
        return self.evaluate(t, x)

    def evaluate(self, t, x):
        """``u(t, x)``; ``t`` and ``x`` broadcast against each other."""
        t, x = np.broadcast_arrays(np.asarray(t, dtype=float), np.asarray(x, dtype=float))
        with np.errstate(divide="ignore", invalid="ignore"):
            xi = np.where(t > 0, x / np.where(t > 0, t, 1.0), np.where(x <= 0, -np.inf, np.inf))
        out = np.full(xi.shape, float(self.u_minus))
        for w in self.waves:
            if w.kind == "shock":
                out = np.where(xi > w.speed_left, w.right, out)
            else:
                inside = (xi > w.speed_left) & (xi < w.speed_right)
                if np.any(inside):
                    out[inside] = self.fp.speed_inverse(xi[inside])
                out = np.where(xi >= w.speed_right, w.right, out)
        return out if out.ndim else float(out)


def solve_riemann_convex(rp: RiemannProblem) -> SelfSimilarSolution:
    """Entropy solution of the Riemann problem for a strictly convex Hamiltonian."""
    fp = rp.fp
    _require_convex(fp)
    if rp.u_minus == rp.u_plus:
        return SelfSimilarSolution(fp, rp.u_minus, rp.u_plus, ())
    if check_lax(rp):
        k = rh_speed(rp)
        wave = Wave("shock", rp.u_minus, rp.u_plus, k, k)
    else:
        wave = Wave("rarefaction", rp.u_minus, rp.u_plus,
                    float(fp.speed(rp.u_minus)), float(fp.speed(rp.u_plus)))
    return SelfSimilarSolution(fp, rp.u_minus, rp.u_plus, (wave,))


def analyze_discontinuity(rp: RiemannProblem, n_samples: int = 101) -> DiscontinuityReport:
    """Full admissibility verdict for a single jump."""
    k = rh_speed(rp)
    e_ok, witness = check_e_condition(rp, n_samples)
    try:
        interval = admissible_speed_interval(rp)
    except NotConvex:
        interval = None
    return DiscontinuityReport(k, True, e_ok, check_lax(rp), witness, interval)


def solve_smooth_convex(fp: FluxPair, u0, t: float, x):
    """Classical solution by characteristics while they do not cross.

    Solves ``x = x0 + t a(u0(x0))`` for the foot ``x0`` by bisection; valid
    for nondecreasing ``u0`` with increasing speed (no shock ever forms) or
    before the first crossing time.
    """
    x = np.asarray(x, dtype=float)
    if t == 0:
        return u0(x)
    a, b = fp.domain
    amin, amax = fp.speed(a), fp.speed(b)
    lo = np.minimum(x - t * amax, x - t * amin) - 1e-9
    hi = np.maximum(x - t * amax, x - t * amin) + 1e-9
    # the foot map x0 -> x0 + t a(u0(x0)) is increasing; solve foot(x0) - x = 0
    x0 = bisect_monotone(lambda z: z + t * fp.speed(u0(z)) - x, np.zeros_like(x), lo, hi)
    return u0(x0)
