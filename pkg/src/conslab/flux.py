"""The model pair (eta, phi) of ``eta(u)_t + phi(u)_x = 0`` and its derived maps.

Everything here is pure: a :class:`FluxPair` is validated once at
construction and never mutated afterwards.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import NonFinite, NonMonotoneEta, OutOfDomain, OutOfRange
from .grid import SampledFunction
from .quadrature import bisect_monotone

Func = Callable[[np.ndarray], np.ndarray]

N_SAMPLE = 1001
CONVEXITY_THRESHOLD = 1e-10
DOMAIN_TOL = 1e-12

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(48)


@dataclass(frozen=True)
class ConvexityClass:
    tag: str  # "strictly_convex" | "strictly_concave" | "neither"
    witness: Optional[float] = None

    @property
    def strictly_convex(self) -> bool:
        return self.tag == "strictly_convex"


@dataclass(frozen=True)
class FluxPair:
    """Density transform ``eta`` and flux ``phi`` with their derivatives.

    Parameters
    ----------
    eta, phi, eta_prime, phi_prime, eta_second, phi_second : callable
        Vectorised scalar functions of ``u``.
    domain : (float, float)
        Admissible states ``[a, b]``.
    name : str
        Label used in reports.
    check_derivatives : bool
        Compare the supplied derivatives with central differences at
        construction (tolerance 1e-6, relative).
    degenerate_endpoints : bool
        Allow ``eta'`` to vanish at the two domain endpoints while staying
        positive inside; ``eta`` is still strictly increasing there.
    """

    eta: Func
    phi: Func
    eta_prime: Func
    phi_prime: Func
    eta_second: Func
    phi_second: Func
    domain: tuple
    name: str = "custom"
    check_derivatives: bool = True
    degenerate_endpoints: bool = False
    params: dict = field(default_factory=dict, compare=False)
    eta_inv: Optional[Func] = field(default=None, compare=False)

    def __post_init__(self):
        a, b = (float(v) for v in self.domain)
        if not a < b:
            raise ValueError(f"empty domain [{a}, {b}]")
        object.__setattr__(self, "domain", (a, b))
        u = np.linspace(a, b, N_SAMPLE)
        samples = [np.asarray(fn(u), dtype=float) * np.ones_like(u) for fn in
                   (self.eta, self.phi, self.eta_prime, self.phi_prime, self.eta_second, self.phi_second)]
        if not all(np.all(np.isfinite(s)) for s in samples):
            raise NonFinite(f"{self.name}: non-finite sample on [{a}, {b}]")
        ep = samples[2]
        check = ep[1:-1] if self.degenerate_endpoints else ep
        if np.min(check) <= 0.0 or np.min(ep) < 0.0:
            raise NonMonotoneEta(f"{self.name}: min eta' = {np.min(ep):.3g} on [{a}, {b}]")
        if self.check_derivatives:
            self._check_derivatives(u)

    def _check_derivatives(self, u):
        a, b = self.domain
        h = 1e-5 * max(1.0, abs(a), abs(b))
        inner = u[(u - 2 * h >= a) & (u + 2 * h <= b)]
        pairs = ((self.eta, self.eta_prime), (self.phi, self.phi_prime),
                 (self.eta_prime, self.eta_second), (self.phi_prime, self.phi_second))
        for fn, dfn in pairs:
            fd = (fn(inner + h) - fn(inner - h)) / (2 * h)
            exact = dfn(inner) * np.ones_like(inner)
            err = np.max(np.abs(fd - exact) / np.maximum(1.0, np.abs(exact)))
            if err > 1e-6:
                raise ValueError(f"{self.name}: derivative mismatch {err:.3g} vs finite differences")

    # ---- derived maps -------------------------------------------------

    @property
    def eta_range(self) -> tuple:
        a, b = self.domain
        return float(self.eta(a)), float(self.eta(b))

    def speed(self, u):
        """Characteristic speed ``phi'(u) / eta'(u)`` (no domain check).

        With degenerate endpoints the speed there is the one-sided limit,
        evaluated a relative ``1e-9`` inside the domain.
        """
        if self.degenerate_endpoints:
            a, b = self.domain
            d = 1e-9 * (b - a)
            u = np.clip(u, a + d, b - d)
        return self.phi_prime(u) / self.eta_prime(u)

    def speed_prime(self, u):
        ep = self.eta_prime(u)
        return (self.phi_second(u) * ep - self.phi_prime(u) * self.eta_second(u)) / ep**2

    def eta_inverse(self, v):
        """``eta^-1``: closed form when the family provides one, else bisection."""
        a, b = self.domain
        if self.eta_inv is not None:
            lo, hi = self.eta_range
            out = np.clip(self.eta_inv(np.clip(v, lo, hi)), a, b)
            return out if np.ndim(out) else float(out)
        return bisect_monotone(self.eta, v, a, b)

    def hamiltonian(self, v):
        return self.phi(self.eta_inverse(v))

    def max_speed(self, lo=None, hi=None) -> float:
        a, b = self.domain
        u = np.linspace(a if lo is None else lo, b if hi is None else hi, N_SAMPLE)
        return float(np.max(np.abs(self.speed(u))))

    def speed_inverse(self, q):
        """``G``: inverse of the (increasing) characteristic speed, clamped to the domain.

        Only meaningful when the speed is strictly increasing (convex
        Hamiltonian); out-of-range speeds map to the nearest endpoint.
        """
        a, b = self.domain
        q = np.clip(np.asarray(q, dtype=float), self.speed(a), self.speed(b))
        return bisect_monotone(self.speed, q, a, b)

    def lagrangian(self, q):
        """Conjugate ``L(q) = sup_v [q v - H(v)]`` over ``v`` in the eta-range.

        For a convex Hamiltonian the supremum is attained at
        ``v = eta(G(q))`` (with ``G`` clamped), giving a closed evaluation.
        """
        u_star = self.speed_inverse(q)
        return np.asarray(q) * self.eta(u_star) - self.phi(u_star)

    def conservative_form(self) -> "FluxPair":
        """The same law written for ``v = eta(u)``: identity density, flux ``H(v)``."""
        lo, hi = self.eta_range
        inv = self.eta_inverse
        return FluxPair(
            eta=lambda v: np.asarray(v, dtype=float),
            phi=lambda v: self.phi(inv(v)),
            eta_prime=lambda v: np.ones_like(np.asarray(v, dtype=float)),
            phi_prime=lambda v: self.speed(inv(v)),
            eta_second=lambda v: np.zeros_like(np.asarray(v, dtype=float)),
            phi_second=lambda v: self.speed_prime(inv(v)) / self.eta_prime(inv(v)),
            domain=(lo, hi),
            name=f"{self.name}[v=eta(u)]",
            check_derivatives=False,
            eta_inv=lambda v: np.asarray(v, dtype=float),
        )

    def with_frame_speed(self, s: float) -> "FluxPair":
        """Flux ``phi + s*eta``: the same law seen from a frame moving at ``-s``."""
        if s == 0:
            return self
        return replace(
            self,
            phi=lambda u: self.phi(u) + s * self.eta(u),
            phi_prime=lambda u: self.phi_prime(u) + s * self.eta_prime(u),
            phi_second=lambda u: self.phi_second(u) + s * self.eta_second(u),
            name=f"{self.name}+{s:g}eta",
            check_derivatives=False,
        )


# ---- free functions mirroring the operation list ------------------------


def _in_domain(fp: FluxPair, u) -> np.ndarray:
    a, b = fp.domain
    u = np.asarray(u, dtype=float)
    tol = DOMAIN_TOL * (1.0 + max(abs(a), abs(b)))
    if np.any(u < a - tol) or np.any(u > b + tol):
        raise OutOfDomain(f"state outside [{a}, {b}]")
    return u


def characteristic_speed(fp: FluxPair, u):
    u = _in_domain(fp, u)
    out = fp.speed(u)
    return float(out) if np.ndim(out) == 0 else out


def hamiltonian(fp: FluxPair, v):
    lo, hi = fp.eta_range
    v = np.asarray(v, dtype=float)
    tol = DOMAIN_TOL * (1.0 + max(abs(lo), abs(hi)))
    if np.any(v < lo - tol) or np.any(v > hi + tol):
        raise OutOfRange(f"value outside eta-range [{lo}, {hi}]")
    out = fp.hamiltonian(np.clip(v, lo, hi))
    return float(out) if np.ndim(out) == 0 else out


def inverse_monotone(f: Func, y, bracket):
    """Solve ``f(x) = y`` on ``bracket`` for strictly monotone ``f`` by bisection."""
    lo, hi = bracket
    return bisect_monotone(f, y, lo, hi)


def legendre_conjugate(f: SampledFunction, s_grid, chunk: int = 512) -> SampledFunction:
    """Discrete Legendre transform ``s -> max_j (s x_j - f(x_j))``."""
    s_grid = np.asarray(s_grid, dtype=float)
    return SampledFunction(s_grid, conjugate_values(f.grid, f.values, s_grid, chunk))


def conjugate_values(x, fx, s, chunk: int = 512) -> np.ndarray:
    """``max_j (s x_j - fx_j)`` for an arbitrary (unsorted) array of slopes ``s``."""
    s = np.asarray(s, dtype=float)
    flat = s.ravel()
    out = np.empty_like(flat)
    for start in range(0, flat.size, chunk):
        block = flat[start:start + chunk, None]
        out[start:start + chunk] = np.max(block * x[None, :] - fx[None, :], axis=1)
    return out.reshape(s.shape)


def convexity_class(fp: FluxPair, n: int = N_SAMPLE, threshold: float = CONVEXITY_THRESHOLD) -> ConvexityClass:
    """Classify ``H = phi o eta^-1`` by the sign of ``(phi'/eta')'`` on a sample."""
    a, b = fp.domain
    u = np.linspace(a, b, n)
    d = np.gradient(fp.speed(u), u)
    sign = np.where(d > threshold, 1, np.where(d < -threshold, -1, 0))
    if np.all(sign == 1):
        return ConvexityClass("strictly_convex")
    if np.all(sign == -1):
        return ConvexityClass("strictly_concave")
    nonzero = np.flatnonzero(sign)
    witness = None
    if nonzero.size:
        first = sign[nonzero[0]]
        flips = nonzero[sign[nonzero] != first]
        if flips.size:
            j = flips[0]
            prev = nonzero[nonzero < j][-1]
            witness = float(0.5 * (u[prev] + u[j]))
    return ConvexityClass("neither", witness)


# ---- flux families ---------------------------------------------------------


def _const(c):
    return lambda u: np.full_like(np.asarray(u, dtype=float), c)


def _gl_integral(g: Func, u) -> np.ndarray:
    """``int_0^u g`` by fixed 48-point Gauss-Legendre, vectorised over ``u``."""
    u = np.asarray(u, dtype=float)
    half = 0.5 * u[..., None]
    pts = half * (_GL_NODES + 1.0)
    return np.sum(_GL_WEIGHTS * g(pts), axis=-1) * half[..., 0]


def _efficiency(params) -> tuple:
    if "Phi" in params:
        Phi = params["Phi"]
        dPhi = params.get("dPhi")
        if dPhi is None:
            def dPhi(u, _f=Phi):
                h = 1e-6
                return (_f(u + h) - _f(u - h)) / (2 * h)
        return Phi, dPhi
    coeffs = params.get("phi_coeffs", params.get("efficiency", [1.0, 1.0]))
    poly = np.polynomial.Polynomial(coeffs)
    dpoly = poly.deriv()
    return (lambda u: poly(np.asarray(u, dtype=float)),
            lambda u: dpoly(np.asarray(u, dtype=float)) * np.ones_like(np.asarray(u, dtype=float)))


def make_flux_pair(family, domain=None, **params) -> FluxPair:
    """Build a validated :class:`FluxPair` from a family name or description.

    ``family`` may also be a mapping with keys ``family``, ``params`` and
    ``domain`` (the shape used in experiment configs).

    Families: ``burgers``, ``power`` (``p``), ``gelfand_q``, ``exp_pair``,
    ``ph`` (``phi_coeffs`` or ``Phi``/``dPhi``, ``mu``), ``linear``
    (``speed``, ``eta_scale``), ``tabulated`` (``u``, ``eta``, ``phi``).
    """
    if isinstance(family, dict):
        spec = dict(family)
        params = {**spec.get("params", {}), **params}
        domain = spec.get("domain", domain)
        family = spec["family"]
    if domain is None:
        domain = {"ph": (0.0, 1.0), "gelfand_q": (0.0, 2.0)}.get(family, (-1.0, 1.0))
    domain = tuple(float(v) for v in domain)

    def arr(u):
        return np.asarray(u, dtype=float)

    if family == "burgers":
        return FluxPair(arr, lambda u: 0.5 * arr(u) ** 2, lambda u: np.ones_like(arr(u)), arr,
                        lambda u: np.zeros_like(arr(u)), lambda u: np.ones_like(arr(u)),
                        domain, "burgers", params=params, eta_inv=arr)
    if family == "power":
        p = float(params.get("p", 2.0))
        return FluxPair(arr, lambda u: arr(u) ** p / p, lambda u: np.ones_like(arr(u)),
                        lambda u: arr(u) ** (p - 1), lambda u: np.zeros_like(arr(u)),
                        lambda u: (p - 1) * arr(u) ** (p - 2), domain, f"power{p:g}", params=params,
                        eta_inv=arr)
    if family == "gelfand_q":
        return FluxPair(lambda u: 0.5 * arr(u) ** 2, lambda u: arr(u) ** 3 / 3.0, arr,
                        lambda u: arr(u) ** 2, lambda u: np.ones_like(arr(u)), lambda u: 2 * arr(u),
                        domain, "gelfand_q", degenerate_endpoints=True, params=params,
                        eta_inv=lambda v: np.sqrt(2.0 * np.maximum(arr(v), 0.0)))
    if family == "exp_pair":
        return FluxPair(lambda u: np.exp(arr(u)), lambda u: 0.5 * np.exp(2 * arr(u)),
                        lambda u: np.exp(arr(u)), lambda u: np.exp(2 * arr(u)),
                        lambda u: np.exp(arr(u)), lambda u: 2 * np.exp(2 * arr(u)),
                        domain, "exp_pair", params=params, eta_inv=lambda v: np.log(arr(v)))
    if family == "linear":
        c = float(params.get("speed", 1.0))
        k = float(params.get("eta_scale", 1.0))
        return FluxPair(lambda u: k * arr(u), lambda u: c * k * arr(u), _const(k), _const(c * k),
                        _const(0.0), _const(0.0), domain, "linear", params=params,
                        eta_inv=lambda v: arr(v) / k)
    if family == "ph":
        mu = float(params.get("mu", 0.0))
        if mu < 0:
            raise ValueError("attrition mu must be non-negative")
        Phi, dPhi = _efficiency(params)
        coeffs = params.get("phi_coeffs", params.get("efficiency"))
        if "Phi" not in params and len(np.atleast_1d(coeffs if coeffs is not None else [1, 1])) <= 2:
            return _ph_affine(domain, mu, params, Phi, dPhi)

        def ep(u):
            return 1.0 / (Phi(u) + mu)

        def pp(u):
            return (Phi(u) - mu) / (Phi(u) + mu)

        return FluxPair(lambda u: _gl_integral(ep, u), lambda u: _gl_integral(pp, u), ep, pp,
                        lambda u: -dPhi(u) / (Phi(u) + mu) ** 2,
                        lambda u: 2 * mu * dPhi(u) / (Phi(u) + mu) ** 2,
                        domain, "ph", params={**params, "mu": mu, "Phi": Phi, "dPhi": dPhi})
    if family == "tabulated":
        u_tab = np.asarray(params["u"], dtype=float)
        eta_i = PchipInterpolator(u_tab, np.asarray(params["eta"], dtype=float))
        phi_i = PchipInterpolator(u_tab, np.asarray(params["phi"], dtype=float))
        d_eta, d_phi = eta_i.derivative(), phi_i.derivative()
        return FluxPair(eta_i, phi_i, d_eta, d_phi, d_eta.derivative(), d_phi.derivative(),
                        domain, "tabulated", check_derivatives=False, params=params)
    raise ValueError(f"unknown flux family {family!r}")


def _ph_affine(domain, mu, params, Phi, dPhi) -> FluxPair:
    """Closed forms for an affine efficiency ``Phi(u) = alpha + beta u``.

    With ``c = alpha + mu``: ``eta = log((c + beta u)/c) / beta`` and
    ``phi = u - 2 mu eta`` (both anchored at ``u = 0``).
    """
    coeffs = list(np.atleast_1d(params.get("phi_coeffs", params.get("efficiency", [1.0, 1.0])))) + [0.0, 0.0]
    alpha, beta = float(coeffs[0]), float(coeffs[1])
    c = alpha + mu

    def arr(u):
        return np.asarray(u, dtype=float)

    if beta == 0.0:
        eta = lambda u: arr(u) / c  # noqa: E731
        eta_inv = lambda v: arr(v) * c  # noqa: E731
    else:
        eta = lambda u: np.log1p(beta * arr(u) / c) / beta  # noqa: E731
        eta_inv = lambda v: c * np.expm1(beta * arr(v)) / beta  # noqa: E731

    def ep(u):
        return 1.0 / (Phi(u) + mu)

    def pp(u):
        return (Phi(u) - mu) / (Phi(u) + mu)

    return FluxPair(eta, lambda u: arr(u) - 2.0 * mu * eta(u), ep, pp,
                    lambda u: -dPhi(u) / (Phi(u) + mu) ** 2,
                    lambda u: 2 * mu * dPhi(u) / (Phi(u) + mu) ** 2,
                    domain, "ph", params={**params, "mu": mu, "Phi": Phi, "dPhi": dPhi},
                    eta_inv=eta_inv)
