import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from conslab.entropy import CandidateSolution, TestFunction, weak_residual
from conslab.errors import DegenerateStates, NonPositiveWeight, NotConvex
from conslab.fixtures import oleinik_uq
from conslab.flux import FluxPair, make_flux_pair
from conslab.riemann import (RiemannProblem, admissible_speed_interval, analyze_discontinuity,
                             chord_speed, check_e_condition, check_lax, rh_speed, solve_riemann_convex,
                             weighted_form_speed)

CONVEX = [
    make_flux_pair("burgers", (-1.0, 1.0)),
    make_flux_pair("ph", (0.0, 1.0), phi_coeffs=[1.0, 1.0], mu=0.25),
    make_flux_pair("exp_pair", (-1.0, 1.0)),
    make_flux_pair("power", (0.2, 2.0), p=3.0),
]


def test_rh_speed_examples(wide_burgers):
    assert abs(rh_speed(RiemannProblem(wide_burgers, 1.0, -1.0))) <= 1e-14
    assert rh_speed(RiemannProblem(wide_burgers, 2.0, 0.0)) == pytest.approx(1.0, abs=1e-14)
    assert rh_speed(RiemannProblem(make_flux_pair("gelfand_q"), 2.0, 0.0)) == pytest.approx(4 / 3, abs=1e-14)


def test_degenerate_states(burgers):
    with pytest.raises(DegenerateStates):
        rh_speed(RiemannProblem(burgers, 0.3, 0.3))
    with pytest.raises(DegenerateStates):
        check_lax(RiemannProblem(burgers, 0.3, 0.3))


def test_lax_examples(burgers):
    assert check_lax(RiemannProblem(burgers, 1.0, -1.0))
    assert not check_lax(RiemannProblem(burgers, -1.0, 1.0))


def test_lax_boundary_equality_fails():
    lin = make_flux_pair("linear", (-1.0, 1.0), speed=0.5)
    assert not check_lax(RiemannProblem(lin, 1.0, -1.0))


def test_e_condition_examples(burgers):
    ok, witness = check_e_condition(RiemannProblem(burgers, 1.0, -1.0), 101)
    assert ok and witness is None
    rp = RiemannProblem(burgers, -1.0, 1.0)
    ok, witness = check_e_condition(rp, 101)
    assert not ok
    assert -1.0 < witness < 1.0
    assert chord_speed(burgers, -1.0, witness) < rh_speed(rp)
    # the state named in the textbook example also violates the chord inequality
    assert chord_speed(burgers, -1.0, 0.0) < rh_speed(rp)


def test_oleinik_family_q2():
    fp = make_flux_pair("burgers", (-2.0, 2.0))
    _, jumps = oleinik_uq(2.0)
    verdicts = []
    for um, up, speed in jumps:
        rp = RiemannProblem(fp, um, up)
        assert rh_speed(rp) == pytest.approx(speed, abs=1e-14)
        verdicts.append(check_e_condition(rp)[0])
    assert verdicts == [True, False, True]


def test_oleinik_family_q1_is_entropic():
    fp = make_flux_pair("burgers", (-1.0, 1.0))
    _, jumps = oleinik_uq(1.0)
    assert [check_e_condition(RiemannProblem(fp, a, b))[0] for a, b, _ in jumps] == [True]


def test_admissible_interval_examples(wide_burgers, ph_linear):
    assert admissible_speed_interval(RiemannProblem(wide_burgers, 1.0, -1.0)) == (-1.0, 1.0)
    rp = RiemannProblem(wide_burgers, 2.0, 0.0)
    lo, hi = admissible_speed_interval(rp)
    assert (lo, hi) == (0.0, 2.0)
    assert lo < rh_speed(rp) < hi
    assert admissible_speed_interval(RiemannProblem(ph_linear, 1.0, 0.0)) == pytest.approx((1.0, 2.0))


def test_admissible_interval_needs_convexity():
    cubic = FluxPair(lambda u: np.asarray(u, dtype=float), lambda u: np.asarray(u) ** 3 / 3,
                     lambda u: np.ones_like(u), lambda u: np.asarray(u) ** 2, lambda u: np.zeros_like(u),
                     lambda u: 2 * np.asarray(u), (-1.0, 1.0))
    with pytest.raises(NotConvex):
        admissible_speed_interval(RiemannProblem(cubic, 1.0, -1.0))
    with pytest.raises(NotConvex):
        solve_riemann_convex(RiemannProblem(cubic, 1.0, -1.0))


def test_weighted_speed_examples(wide_burgers):
    rp = RiemannProblem(wide_burgers, 2.0, 0.0)
    assert weighted_form_speed(rp, lambda u: np.ones_like(u)) == pytest.approx(1.0, rel=1e-10)
    assert weighted_form_speed(rp, lambda u: u) == pytest.approx(4 / 3, rel=1e-10)
    with pytest.raises(NonPositiveWeight):
        weighted_form_speed(rp, lambda u: u - 1.0)


def test_riemann_solution_examples(burgers):
    fan = solve_riemann_convex(RiemannProblem(burgers, -1.0, 1.0))
    assert fan(1.0, 0.5) == pytest.approx(0.5, abs=1e-12)
    assert fan(1.0, -3.0) == -1.0 and fan(1.0, 3.0) == 1.0
    shock = solve_riemann_convex(RiemannProblem(burgers, 1.0, -1.0))
    assert shock(1.0, 0.1) == -1.0
    assert shock(1.0, -0.1) == 1.0
    const = solve_riemann_convex(RiemannProblem(burgers, 0.4, 0.4))
    np.testing.assert_array_equal(const(1.0, np.linspace(-1, 1, 5)), 0.4)


def test_report_shape(burgers):
    d = analyze_discontinuity(RiemannProblem(burgers, -1.0, 1.0)).as_dict()
    assert set(d) == {"speed", "lax", "e_condition", "witness", "admissible_interval"}
    assert d["lax"] is False and d["e_condition"] is False


def test_riemann_solution_is_weak_solution(burgers):
    """The weak residual shrinks at first order with the sampling spacing."""
    sol = solve_riemann_convex(RiemannProblem(burgers, 1.0, -0.5))
    tf = TestFunction(0.6, 0.2, 0.4, 0.6)
    cand = CandidateSolution.from_function(sol, (0.1, 1.1), (-1.0, 1.0), (-0.5, 1.0))
    res = [abs(weak_residual(burgers, cand, tf, quad_n=n)) for n in (64, 128, 256)]
    assert res[-1] < 1e-3
    assert res[-1] <= res[0]


state = st.integers(0, 20)


@pytest.mark.parametrize("fp", CONVEX, ids=lambda f: f.name)
def test_lax_iff_e_on_state_grid(fp):
    a, b = fp.domain
    grid = np.linspace(a, b, 21)
    for um in grid:
        for up in grid:
            if um == up:
                continue
            rp = RiemannProblem(fp, um, up)
            assert check_lax(rp) == check_e_condition(rp)[0], (um, up)


@pytest.mark.parametrize("fp", CONVEX, ids=lambda f: f.name)
@given(i=state, j=state)
def test_weighted_speed_with_eta_prime_is_rh(fp, i, j):
    assume(i != j)
    a, b = fp.domain
    um, up = a + (b - a) * i / 20, a + (b - a) * j / 20
    rp = RiemannProblem(fp, um, up)
    assert weighted_form_speed(rp, fp.eta_prime) == pytest.approx(rh_speed(rp), rel=1e-10, abs=1e-12)


@pytest.mark.parametrize("fp", CONVEX, ids=lambda f: f.name)
@given(i=state, j=state, w=st.floats(0.1, 3.0))
def test_speeds_within_characteristic_hull(fp, i, j, w):
    assume(i != j)
    a, b = fp.domain
    um, up = a + (b - a) * i / 20, a + (b - a) * j / 20
    rp = RiemannProblem(fp, um, up)
    lo, hi = admissible_speed_interval(rp)
    tol = 1e-10 * (1 + abs(hi))
    assert lo - tol <= rh_speed(rp) <= hi + tol
    k = weighted_form_speed(rp, lambda u: fp.eta_prime(u) * np.exp(w * u))
    assert lo - tol <= k <= hi + tol


def test_lax_implies_e_for_convex():
    fp = CONVEX[0]
    for um, up in [(1.0, -1.0), (0.5, -0.2), (0.9, 0.1)]:
        rp = RiemannProblem(fp, um, up)
        assert check_lax(rp) and check_e_condition(rp)[0]
