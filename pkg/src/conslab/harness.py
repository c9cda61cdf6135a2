"""Experiment orchestration: config parsing, solver matrices and reports.

An experiment is one INI file::

    [experiment]
    methods = viscous, laxoleinik, kinetic, godunov
    ladder = 200, 400, 800          ; or  h = 0.04, 0.02, 0.01
    times = 0.5, 1.0
    out = out/fan

    [flux]                          ; optional when a fixture supplies it
    family = burgers
    domain = -1, 1
    params = {}                     ; JSON object

    [initial]
    kind = riemann                  ; riemann | fixture | table
    u_minus = -1
    u_plus = 1
    x_min = -2
    x_max = 2

    [method.viscous]
    epsilon = h/2

    [tolerances]
    pairwise_l1 = 0.05
    monotone = true

Optional sections: ``[reference]`` (``method``, ``refine`` and knobs; a
fine-grid run used in place of an exact oracle), ``[verify]``
(``t_start``, ``t_step`` for the entropy certificate snapshots).
Tolerance keys: ``pairwise_l1``, ``oracle_l1``, ``monotone`` (with
``floor``, the level below which a distance counts as converged),
``min_order``, ``order_norm`` (``l1`` or ``sup``), ``max_principle``,
``certificate``.
"""
from __future__ import annotations

import configparser
import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .entropy import CandidateSolution, entropy_certificate
from .errors import ConfigError, ConsLabError, DegenerateFit, NotConvex
from .fixtures import FIXTURES, get_fixture, riemann_data
from .flux import FluxPair, make_flux_pair
from .grid import Grid1D, GridFunction
from .methods import METHODS, run_method
from .metrics import estimate_order, l1_distance
from .riemann import RiemannProblem, analyze_discontinuity, solve_riemann_convex

__all__ = ["ExperimentConfig", "ComparisonReport", "Check", "load_config", "run_experiment",
           "solve_experiment", "verify_experiment", "order_experiment", "riemann_report",
           "write_snapshots", "write_report", "dumps", "l1_distance", "estimate_order"]

TOLERANCE_KEYS = ("pairwise_l1", "oracle_l1", "monotone", "floor", "min_order", "order_norm",
                  "max_principle", "certificate")
DEFAULT_FLOOR = 1e-6  # below this an L1 distance is solver round-off, not discretisation error


def _floats(text: str) -> tuple:
    return tuple(float(v) for v in text.replace(";", ",").split(",") if v.strip())


def _knob(text: str):
    try:
        return float(text)
    except ValueError:
        return text.strip()


@dataclass(frozen=True)
class InitialSpec:
    kind: str
    x_min: float
    x_max: float
    u_minus: float = None
    u_plus: float = None
    x0: float = 0.0
    fixture: str = None
    table: tuple = None  # (x, u) arrays

    def function(self):
        if self.kind == "riemann":
            return riemann_data(self.u_minus, self.u_plus, self.x0)
        if self.kind == "fixture":
            return get_fixture(self.fixture).u0
        x, u = self.table
        return lambda s: np.interp(np.asarray(s, dtype=float), x, u)

    @property
    def states(self):
        return None if self.u_minus is None else (self.u_minus, self.u_plus)


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything needed to reproduce one experiment."""

    flux: FluxPair
    flux_spec: dict
    initial: InitialSpec
    methods: tuple
    ladder: tuple  # n_cells, strictly increasing
    times: tuple
    out: str = "out"
    knobs: dict = field(default_factory=dict)
    reference: dict = None
    verify: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.methods:
            raise ConfigError("at least one method is required")
        unknown = [m for m in self.methods if m not in METHODS]
        if unknown:
            raise ConfigError(f"unknown methods {unknown}; choose from {', '.join(METHODS)}")
        if not self.ladder or any(b <= a for a, b in zip(self.ladder, self.ladder[1:])):
            raise ConfigError("the grid ladder must be strictly refining")
        if not self.times or min(self.times) < 0:
            raise ConfigError("times must be a non-empty list of non-negative values")

    def grid(self, n_cells: int) -> Grid1D:
        return Grid1D(self.initial.x_min, self.initial.x_max, int(n_cells))

    def initial_data(self, n_cells: int) -> GridFunction:
        return GridFunction.from_callable(self.grid(n_cells), self.initial.function())


def _flux_from_section(sec) -> tuple:
    try:
        params = json.loads(sec.get("params", "{}"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"flux params must be a JSON object: {exc}") from None
    if not isinstance(params, dict):
        raise ConfigError("flux params must be a JSON object")
    spec = {"family": sec.get("family"), "params": params}
    if "domain" in sec:
        spec["domain"] = _floats(sec["domain"])
    if not spec["family"]:
        raise ConfigError("[flux] needs a family")
    try:
        return make_flux_pair(spec), spec
    except (ValueError, KeyError, ConsLabError) as exc:
        raise ConfigError(f"bad flux spec: {exc}") from None


def _read_table(path: Path) -> tuple:
    with open(path, newline="") as fh:
        rows = [(float(r["x"]), float(r["u"])) for r in csv.DictReader(fh)]
    if len(rows) < 2:
        raise ConfigError(f"{path}: a table needs at least two rows")
    x, u = map(np.array, zip(*sorted(rows)))
    return x, u


def load_config(path, out: str = None) -> ExperimentConfig:
    """Parse an experiment file; any problem raises :class:`ConfigError`."""
    path = Path(path)
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    cp.optionxform = str
    try:
        if not cp.read(path):
            raise ConfigError(f"cannot read config {path}")
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    try:
        return _build_config(cp, path.parent, out)
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from None


def _build_config(cp, base: Path, out) -> ExperimentConfig:
    exp = cp["experiment"] if cp.has_section("experiment") else {}
    ini = cp["initial"]
    kind = ini.get("kind", "riemann")
    fixture = None
    if kind == "fixture":
        if ini["fixture"] not in FIXTURES:
            raise ConfigError(f"unknown fixture {ini['fixture']!r}")
        fixture = get_fixture(ini["fixture"])
    if cp.has_section("flux"):
        fp, spec = _flux_from_section(cp["flux"])
    elif fixture is not None:
        fp, spec = fixture.fp, {"family": fixture.fp.name, "fixture": fixture.name}
    else:
        raise ConfigError("a [flux] section is required unless the initial data is a fixture")

    x_min = float(ini.get("x_min", fixture.x_min if fixture else "nan"))
    x_max = float(ini.get("x_max", fixture.x_max if fixture else "nan"))
    if not x_min < x_max:
        raise ConfigError("[initial] needs x_min < x_max")
    if kind == "riemann":
        initial = InitialSpec(kind, x_min, x_max, float(ini["u_minus"]), float(ini["u_plus"]),
                              float(ini.get("x0", 0.0)))
    elif kind == "fixture":
        states = fixture.riemann or (None, None)
        initial = InitialSpec(kind, x_min, x_max, *states, fixture=fixture.name)
    elif kind == "table":
        initial = InitialSpec(kind, x_min, x_max, table=_read_table(base / ini["table"]))
    else:
        raise ConfigError(f"unknown initial kind {kind!r}")

    span = x_max - x_min
    if "ladder" in exp:
        ladder = tuple(int(v) for v in _floats(exp["ladder"]))
    elif "h" in exp:
        ladder = []
        for h in _floats(exp["h"]):
            n = span / h
            if abs(n - round(n)) > 1e-9 * n:
                raise ConfigError(f"spacing {h} does not divide [{x_min}, {x_max}]")
            ladder.append(int(round(n)))
        ladder = tuple(ladder)
    else:
        ladder = (200,)

    methods = tuple(m.strip() for m in exp.get("methods", "").split(",") if m.strip())
    knobs = {m: {k: _knob(v) for k, v in cp[f"method.{m}"].items()}
             for m in methods if cp.has_section(f"method.{m}")}
    reference = None
    if cp.has_section("reference"):
        reference = {k: _knob(v) for k, v in cp["reference"].items()}
        if reference.get("method") not in METHODS:
            raise ConfigError("[reference] needs a known method")
    verify = {k: float(v) for k, v in cp["verify"].items()} if cp.has_section("verify") else {}
    tolerances = {}
    if cp.has_section("tolerances"):
        for k, v in cp["tolerances"].items():
            if k not in TOLERANCE_KEYS:
                raise ConfigError(f"unknown tolerance {k!r}")
            if k in ("monotone", "certificate"):
                tolerances[k] = cp["tolerances"].getboolean(k)
            elif k == "order_norm":
                tolerances[k] = v.strip()
            else:
                tolerances[k] = float(v)
    return ExperimentConfig(fp, spec, initial, methods, ladder,
                            _floats(exp.get("times", "0.5, 1.0")),
                            out or exp.get("out", "out"), knobs, reference, verify, tolerances)


# ---- reports ---------------------------------------------------------------


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    tolerance: float
    passed: bool

    def as_dict(self) -> dict:
        return {"name": self.name, "value": self.value, "tolerance": self.tolerance,
                "passed": bool(self.passed)}


@dataclass
class ComparisonReport:
    """Cross-method agreement, oracle errors, orders and tolerance checks.

    ``pairwise[n][t]`` is the symmetric L1 matrix (rows and columns in
    ``methods`` order) at rung ``n``, measured on the finest grid;
    ``oracle[method][n][t]`` is the L1 (and sup) error against the exact
    solution or the reference run, measured on the rung's own nodes.
    """

    methods: tuple
    ladder: tuple
    times: tuple
    pairwise: dict = field(default_factory=dict)
    oracle: dict = field(default_factory=dict)
    orders: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    errors: dict = field(default_factory=dict)
    extra: dict = field(default_factory=dict)
    runs: dict = field(default_factory=dict, repr=False)  # snapshots, not serialised

    @property
    def passed(self) -> bool:
        return not self.errors and all(c.passed for c in self.checks)

    def as_dict(self) -> dict:
        return {
            "methods": list(self.methods),
            "ladder": list(self.ladder),
            "times": list(self.times),
            "pairwise_l1": {str(n): {_tkey(t): m for t, m in row.items()} for n, row in self.pairwise.items()},
            "oracle": {m: {str(n): {_tkey(t): e for t, e in row.items()} for n, row in per.items()}
                       for m, per in self.oracle.items()},
            "orders": self.orders,
            "checks": [c.as_dict() for c in self.checks],
            "errors": self.errors,
            "passed": self.passed,
            **self.extra,
        }

    def to_json(self) -> str:
        return dumps(self.as_dict())


def _plain(obj):
    """``json`` fallback for numpy scalars and arrays."""
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"{type(obj).__name__} is not JSON serialisable")


def dumps(data) -> str:
    """Deterministic JSON: sorted keys, fixed indentation."""
    return json.dumps(data, sort_keys=True, indent=2, default=_plain)


def _tkey(t: float) -> str:
    return f"{t:g}"


def _resolve_knobs(knobs: dict, h: float) -> dict:
    """Turn ``"h/2"``-style knobs into numbers using the rung spacing ``h``."""
    out = {}
    for k, v in knobs.items():
        if isinstance(v, str) and v.replace(" ", "").startswith("h"):
            _, _, den = v.partition("/")
            v = h / float(den) if den else h
        out[k] = v
    return out


def _run_matrix(cfg: ExperimentConfig, times, rungs=None):
    """``runs[method][n]`` snapshot lists; failures go to ``errors``."""
    runs, errors = {}, {}
    for n in rungs or cfg.ladder:
        u0 = cfg.initial_data(n)
        for m in cfg.methods:
            knobs = _resolve_knobs(cfg.knobs.get(m, {}), u0.grid.dx)
            try:
                runs.setdefault(m, {})[n] = run_method(m, cfg.flux, u0, max(times), times, **knobs)
            except (ConsLabError, ValueError, FloatingPointError) as exc:
                errors[f"{m}@{n}"] = f"{type(exc).__name__}: {exc}"
    return runs, errors


def _at(snaps, t: float) -> GridFunction:
    for s in snaps:
        if abs(s.time - t) <= 1e-12 * max(1.0, t):
            return s
    raise KeyError(f"no snapshot at t={t}")


def _oracle(cfg: ExperimentConfig):
    """Exact ``u(t, x)`` for Riemann data with a convex Hamiltonian, else ``None``."""
    states = cfg.initial.states
    if states is None or cfg.initial.kind == "table":
        return None
    try:
        sol = solve_riemann_convex(RiemannProblem(cfg.flux, *states))
    except NotConvex:
        return None
    x0 = cfg.initial.x0
    return lambda t, x: sol(t, np.asarray(x) - x0)


def _references(cfg: ExperimentConfig, times) -> dict:
    """Reference snapshots per rung from a run refined ``refine`` times."""
    ref = dict(cfg.reference)
    method = ref.pop("method")
    refine = int(ref.pop("refine", 8))
    out = {}
    for n in cfg.ladder:
        h = cfg.grid(n).dx
        u0 = cfg.initial_data(n * refine)
        snaps = run_method(method, cfg.flux, u0, max(times), times, **_resolve_knobs(ref, h))
        out[n] = snaps
    return out


def _error_table(cfg: ExperimentConfig, runs: dict, times) -> dict:
    """``table[method][n][t] = (l1, sup)`` against the oracle or the reference."""
    exact = _oracle(cfg)
    refs = _references(cfg, times) if cfg.reference else None
    if exact is None and refs is None:
        return {}
    table = {}
    for m, per in runs.items():
        for n, snaps in per.items():
            for t in times:
                s = _at(snaps, t)
                if refs is not None:
                    target = np.interp(s.x, _at(refs[n], t).x, _at(refs[n], t).values)
                else:
                    target = exact(t, s.x)
                err = GridFunction(s.grid, np.abs(s.values - target), t)
                l1 = l1_distance(err, GridFunction(s.grid, np.zeros_like(s.values), t))
                table.setdefault(m, {}).setdefault(n, {})[t] = {"l1": l1, "sup": float(np.max(err.values))}
    return table


def _orders(cfg: ExperimentConfig, table: dict, times) -> dict:
    orders = {}
    for m, per in table.items():
        rungs = sorted(per)
        if len(rungs) < 3:
            continue
        for t in times:
            for norm in ("l1", "sup"):
                try:
                    val = estimate_order([(cfg.grid(n).dx, per[n][t][norm]) for n in rungs])
                except DegenerateFit:
                    val = None
                orders.setdefault(m, {}).setdefault(_tkey(t), {})[norm] = val
    return orders


def _decreasing(values, floor: float = 0.0) -> bool:
    """Strict decrease; once a value is at or below ``floor`` it counts as converged."""
    return all(b < a or max(a, b) <= floor for a, b in zip(values, values[1:]))


def _max_principle_checks(cfg: ExperimentConfig, runs: dict, tol: float) -> list:
    lo, hi = np.inf, -np.inf
    for n in cfg.ladder:
        v = cfg.initial_data(n).values
        lo, hi = min(lo, float(np.min(v))), max(hi, float(np.max(v)))
    worst = 0.0
    for m, per in runs.items():
        # the level system holds its outer neighbours at 0 and 1, so they are part of its data
        m_lo, m_hi = (min(lo, 0.0), max(hi, 1.0)) if m == "ph" else (lo, hi)
        for snaps in per.values():
            for s in snaps:
                worst = max(worst, float(np.max(s.values)) - m_hi, m_lo - float(np.min(s.values)))
    return [Check("max_principle", worst, tol, worst <= tol)]


def run_experiment(cfg: ExperimentConfig) -> ComparisonReport:
    """Run every (method, rung) cell and compare on the finest grid.

    Examples
    --------
    >>> cfg = ExperimentConfig(make_flux_pair("burgers"), {"family": "burgers"},
    ...                        InitialSpec("riemann", -1.0, 1.0, 0.5, 0.5),
    ...                        ("godunov", "viscous"), (40,), (0.5,))
    >>> run_experiment(cfg).pairwise[40][0.5]
    [[0.0, 0.0], [0.0, 0.0]]
    """
    times = tuple(sorted(set(cfg.times)))
    runs, errors = _run_matrix(cfg, times)
    report = ComparisonReport(cfg.methods, cfg.ladder, times, errors=errors, runs=runs)
    fine = cfg.grid(cfg.ladder[-1])
    ok = [m for m in cfg.methods if all(n in runs.get(m, {}) for n in cfg.ladder)]
    for n in cfg.ladder:
        report.pairwise[n] = {}
        for t in times:
            fields = {m: _at(runs[m][n], t).resample(fine) for m in ok}
            mat = np.zeros((len(cfg.methods), len(cfg.methods)))
            for i, a in enumerate(cfg.methods):
                for j in range(i + 1, len(cfg.methods)):
                    b = cfg.methods[j]
                    d = l1_distance(fields[a], fields[b]) if a in fields and b in fields else np.nan
                    mat[i, j] = mat[j, i] = d
            report.pairwise[n][t] = mat.tolist()
    try:
        table = _error_table(cfg, {m: runs[m] for m in ok}, times)
    except (ConsLabError, ValueError) as exc:
        table = {}
        errors["reference"] = f"{type(exc).__name__}: {exc}"
    report.oracle = table
    report.orders = _orders(cfg, table, times)
    report.checks = _comparison_checks(cfg, report, times)
    return report


def _comparison_checks(cfg: ExperimentConfig, report: ComparisonReport, times) -> list:
    tol = cfg.tolerances
    checks = []
    finest = cfg.ladder[-1]
    k = len(cfg.methods)
    if "pairwise_l1" in tol and k > 1:
        worst = max(float(np.nanmax(np.asarray(report.pairwise[finest][t]))) for t in times)
        checks.append(Check("pairwise_l1", worst, tol["pairwise_l1"], bool(worst <= tol["pairwise_l1"])))
    if tol.get("monotone") and len(cfg.ladder) > 1:
        floor = tol.get("floor", DEFAULT_FLOOR)
        bad = 0
        for t in times:
            for i in range(k):
                for j in range(i + 1, k):
                    seq = [report.pairwise[n][t][i][j] for n in cfg.ladder]
                    bad += not _decreasing(seq, floor)
            for per in report.oracle.values():
                bad += not _decreasing([per[n][t]["l1"] for n in cfg.ladder], floor)
        checks.append(Check("monotone", float(bad), 0.0, bad == 0))
    if "oracle_l1" in tol and report.oracle:
        worst = max(per[finest][t]["l1"] for per in report.oracle.values() for t in times)
        checks.append(Check("oracle_l1", worst, tol["oracle_l1"], worst <= tol["oracle_l1"]))
    if "min_order" in tol:
        norm = tol.get("order_norm", "l1")
        vals = [o[_tkey(max(times))][norm] for o in report.orders.values()]
        worst = min((v for v in vals if v is not None), default=float("nan"))
        ok = bool(vals) and None not in vals and worst >= tol["min_order"]
        checks.append(Check(f"min_order_{norm}", worst, tol["min_order"], ok))
    return checks


def solve_experiment(cfg: ExperimentConfig) -> ComparisonReport:
    """Run the matrix and check the maximum principle."""
    times = tuple(sorted(set(cfg.times)))
    runs, errors = _run_matrix(cfg, times)
    report = ComparisonReport(cfg.methods, cfg.ladder, times, errors=errors, runs=runs)
    report.checks = _max_principle_checks(cfg, runs, cfg.tolerances.get("max_principle", 1e-8))
    return report


def verify_experiment(cfg: ExperimentConfig) -> ComparisonReport:
    """Entropy certificates for every method on the finest rung.

    Snapshots are recorded from ``t_start`` (default 0.1) to the last
    configured time every ``t_step`` (default 0.05); the certificate is
    built on that window.
    """
    t0 = cfg.verify.get("t_start", 0.1)
    dt = cfg.verify.get("t_step", 0.05)
    t1 = max(cfg.times)
    times = tuple(np.round(np.arange(t0, t1 + 0.5 * dt, dt), 12))
    n = cfg.ladder[-1]
    runs, errors = _run_matrix(cfg, times, rungs=(n,))
    report = ComparisonReport(cfg.methods, (n,), times, errors=errors, runs=runs)
    certs = {}
    for m, per in runs.items():
        cand = CandidateSolution.from_snapshots([s for s in per[n] if s.time >= t0 - 1e-12])
        certs[m] = entropy_certificate(cfg.flux, cand)
    report.extra["certificates"] = {m: c.as_dict() for m, c in certs.items()}
    if cfg.tolerances.get("certificate", True):
        for m, c in certs.items():
            report.checks.append(Check(f"certificate_{m}", c.kruzhkov_worst, -c.worst_budget, c.passed))
    return report


def order_experiment(cfg: ExperimentConfig):
    """Error tables and empirical orders along the ladder."""
    report = run_experiment(cfg)
    if not report.oracle:
        report.errors["oracle"] = "no exact solution and no [reference] section"
    return report


def riemann_report(cfg: ExperimentConfig) -> dict:
    """Admissibility verdict for the configured jump."""
    states = cfg.initial.states
    if states is None:
        raise ConfigError("the riemann subcommand needs Riemann initial data")
    return analyze_discontinuity(RiemannProblem(cfg.flux, *states)).as_dict()


# ---- output ----------------------------------------------------------------


def snapshot_name(method: str, h: float, t: float, fmt: str) -> str:
    return f"snapshot_{method}_{h:g}_{t:g}.{fmt}"


def write_snapshots(runs: dict, out, fmt: str = "csv", times=None) -> list:
    """One file per (method, rung, time); ``fmt`` is ``csv`` (x,u) or ``json``."""
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for m in sorted(runs):
        for n in sorted(runs[m]):
            for s in runs[m][n]:
                if times is not None and not any(abs(s.time - t) <= 1e-12 for t in times):
                    continue
                path = out / snapshot_name(m, s.grid.dx, s.time, fmt)
                if fmt == "json":
                    path.write_text(json.dumps({"x": s.x.tolist(), "u": s.values.tolist()}))
                else:
                    np.savetxt(path, np.column_stack((s.x, s.values)), delimiter=",",
                               header="x,u", comments="", fmt="%.17g")
                written.append(path)
    return written


def write_report(payload, out) -> Path:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "report.json"
    data = payload.as_dict() if hasattr(payload, "as_dict") else payload
    path.write_text(dumps(data) + "\n")
    return path
