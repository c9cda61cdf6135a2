import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from conslab.entropy import (CandidateSolution, TestFunction, bump, bump_lattice, bump_prime,
                             change_of_variables_check, entropy_certificate, entropy_decomposition_check,
                             initial_trace_distances, kruzhkov_residual, kruzhkov_residuals,
                             quadrature_budget, weak_residual)
from conslab.errors import OutOfInterval, SupportEscape
from conslab.fixtures import get_fixture, oleinik_uq, riemann_data, shock_candidate
from conslab.flux import make_flux_pair
from conslab.grid import Grid1D, GridFunction

WINDOW_T, WINDOW_X = (0.0, 3.0), (-3.0, 3.0)


def _cand(func, bounds=(-1.0, 1.0)):
    return CandidateSolution.from_function(func, WINDOW_T, WINDOW_X, bounds)


def _jump_oracle(tf, speed, bracket):
    """``bracket * int f(t, speed t) dt`` for a single straight jump through the origin."""
    def f_on_line(t):
        return float(tf.values(t, speed * t)[0])
    return bracket * quad(f_on_line, tf.t0 - tf.r_t, tf.t0 + tf.r_t, limit=200)[0]


# ---- test functions ----------------------------------------------------------


def test_bump_vanishes_outside_support():
    s = np.array([-2.0, -1.0, 1.0, 1.5])
    assert np.all(bump(s) == 0) and np.all(bump_prime(s) == 0)
    assert bump(np.array([0.0]))[0] == pytest.approx(np.exp(-1.0))


def test_bump_derivative_matches_difference_quotient():
    s = np.linspace(-0.9, 0.9, 37)
    h = 1e-6
    assert np.allclose(bump_prime(s), (bump(s + h) - bump(s - h)) / (2 * h), atol=1e-7)


def test_radii_must_be_positive():
    with pytest.raises(ValueError):
        TestFunction(1.0, 0.0, 0.0, 1.0)


def test_support_must_stay_in_window(burgers):
    cand = _cand(lambda t, x: np.zeros_like(x))
    with pytest.raises(SupportEscape):
        weak_residual(burgers, cand, TestFunction(0.5, 0.0, 1.0, 1.0))
    with pytest.raises(SupportEscape):
        weak_residual(burgers, cand, TestFunction(1.5, 2.5, 1.0, 1.0))


def test_lattice_covers_window():
    lat = bump_lattice((0.0, 1.0), (-2.0, 2.0))
    assert len(lat) == 64
    for tf in lat:
        assert tf.t0 - tf.r_t >= 0.0 and tf.t0 + tf.r_t <= 1.0
        assert tf.x0 - tf.r_x >= -2.0 and tf.x0 + tf.r_x <= 2.0


# ---- weak residual -----------------------------------------------------------


@pytest.mark.parametrize("c", [-0.8, 0.0, 0.6])
def test_constant_candidate_has_no_residual(burgers, c):
    cand = _cand(lambda t, x: np.full_like(x, c))
    assert abs(weak_residual(burgers, cand, TestFunction(1.5, 0.3, 1.0, 1.0), 64)) <= 1e-12


@pytest.mark.parametrize("quad_n", [64, 128, 256])
def test_entropic_shock_is_weak_solution(burgers, quad_n):
    cand = _cand(shock_candidate(1.0, -1.0, 0.0))
    assert abs(weak_residual(burgers, cand, TestFunction(1.5, 0.0, 1.0, 1.0), quad_n)) <= 5 / quad_n


@pytest.mark.parametrize("quad_n", [64, 128, 256])
def test_wrong_speed_shock_residual(burgers, quad_n):
    tf = TestFunction(1.5, 0.75, 1.0, 1.0)
    res = weak_residual(burgers, _cand(shock_candidate(1.0, -1.0, 0.5)), tf, quad_n)
    # [phi] = 0 and [eta] = 2 across the jump, so the bracket is -speed * 2
    assert res == pytest.approx(_jump_oracle(tf, 0.5, -1.0), abs=5 / quad_n)
    assert abs(res) >= 0.01


def test_oleinik_q2_is_weak_solution(burgers):
    u, _ = oleinik_uq(2.0)
    cand = _cand(u, (-2.0, 2.0))
    for tf in (TestFunction(1.5, 0.0, 1.0, 1.0), TestFunction(1.5, 0.5, 1.0, 1.0)):
        assert abs(weak_residual(burgers, cand, tf, 256)) <= 5 / 256


# ---- Kruzhkov residual -------------------------------------------------------


def test_entropic_shock_produces_entropy(burgers):
    tf = TestFunction(1.5, 0.0, 1.0, 1.0)
    res = kruzhkov_residual(burgers, _cand(shock_candidate(1.0, -1.0, 0.0)), tf, 0.0)
    assert res > 0
    assert res == pytest.approx(_jump_oracle(tf, 0.0, 1.0), rel=1e-3)


def test_non_entropic_shock_is_rejected(burgers):
    tf = TestFunction(1.5, 0.0, 1.0, 1.0)
    res = kruzhkov_residual(burgers, _cand(shock_candidate(-1.0, 1.0, 0.0)), tf, 0.0)
    assert res < -0.01
    assert res == pytest.approx(_jump_oracle(tf, 0.0, -1.0), rel=1e-3)


@pytest.mark.parametrize("speed", [0.0, 0.5, -0.25])
def test_outer_levels_collapse_to_weak_residual(burgers, speed):
    cand = _cand(shock_candidate(1.0, -1.0, speed))
    tf = TestFunction(1.5, 1.5 * speed, 1.0, 1.0)
    w = weak_residual(burgers, cand, tf)
    assert kruzhkov_residual(burgers, cand, tf, -1.0) == pytest.approx(w, abs=1e-12)
    assert kruzhkov_residual(burgers, cand, tf, 1.0) == pytest.approx(-w, abs=1e-12)


def test_vectorised_levels_match_scalar(burgers):
    cand = _cand(shock_candidate(1.0, -1.0, 0.0))
    tf = TestFunction(1.5, 0.0, 1.0, 1.0)
    ks = np.linspace(-1, 1, 7)
    many = kruzhkov_residuals(burgers, cand, tf, ks, 128)
    assert np.allclose(many, [kruzhkov_residual(burgers, cand, tf, k, 128) for k in ks], atol=1e-14)


@given(st.floats(-1, 1), st.floats(-0.8, 0.8), st.floats(-0.5, 0.5))
def test_linear_entropy_splits_into_weak_terms(k, speed, x0):
    # above and below k the modulus is linear, so the two one-sided pieces sum to the weak residual
    fp = make_flux_pair("burgers", (-1.0, 1.0))
    cand = _cand(lambda t, x: np.clip(x / (t + 1.0) - speed, -1, 1))
    tf = TestFunction(1.5, x0, 1.0, 1.0)
    lo = kruzhkov_residual(fp, cand, tf, -1.0, 128)
    hi = kruzhkov_residual(fp, cand, tf, 1.0, 128)
    w = weak_residual(fp, cand, tf, 128)
    assert lo - hi == pytest.approx(2 * w, abs=1e-12)


# ---- certificates ------------------------------------------------------------


def _u2():
    return _cand(shock_candidate(-1.0, 1.0, 0.0))


def test_certificate_rejects_u2(burgers):
    cert = entropy_certificate(burgers, _u2())
    assert not cert.passed
    assert cert.kruzhkov_worst < -0.01
    assert set(cert.as_dict()) == {"weak", "kruzhkov", "checks", "pass"}


def test_certificate_accepts_exact_fan(burgers):
    cand = _cand(lambda t, x: np.clip(x / np.maximum(t, 1e-12), -1, 1))
    cert = entropy_certificate(burgers, cand, quad_n=128)
    assert cert.passed
    assert cert.n_checks == 64 * 33


def test_certificate_from_snapshots(burgers):
    g = Grid1D(-2, 2, 200)
    snaps = [GridFunction.from_callable(g, lambda x, t=t: np.clip(x / t, -1, 1), t) for t in (0.5, 1.0, 1.5)]
    cand = CandidateSolution.from_snapshots(snaps)
    assert cand.t_window == (0.5, 1.5) and cand.bounds == (-1.0, 1.0)
    assert entropy_certificate(burgers, cand, quad_n=64).passed


def test_budget_formula():
    tf = TestFunction(1.0, 0.0, 0.5, 0.25)
    assert quadrature_budget(tf, 100) == pytest.approx(10 * 0.5 / 100)


def test_initial_trace_shrinks(burgers):
    f = get_fixture("burgers_fan")
    cand = _cand(lambda t, x: np.clip(x / np.maximum(t, 1e-12), -1, 1))
    d = initial_trace_distances(cand, f.u0, np.linspace(-2, 2, 801))
    assert d[0] > d[1] > d[2]


# ---- |u - k| decomposition ---------------------------------------------------


def test_decomposition_hand_example():
    lhs, rhs = entropy_decomposition_check(lambda u: u * u, (-1.0, 1.0), 0.5,
                                           lambda u: 2 * u, lambda u: 2.0 + 0 * u)
    assert lhs == 0.25 and rhs == pytest.approx(0.25, abs=1e-12)


def test_decomposition_linear_phi():
    lhs, rhs = entropy_decomposition_check(lambda u: 3 * u - 1, (-1.0, 2.0), 0.7,
                                           lambda u: 3.0 + 0 * u, lambda u: 0 * u)
    assert lhs == pytest.approx(rhs, abs=1e-14)
    lhs, rhs = entropy_decomposition_check(lambda u: 3 * u - 1, (-1.0, 2.0), 0.7)
    assert abs(lhs - rhs) <= 1e-8


def test_decomposition_exponential():
    lhs, rhs = entropy_decomposition_check(np.exp, (0.0, 1.0), 0.3, np.exp, np.exp)
    assert abs(lhs - rhs) <= 1e-8


def test_decomposition_interval_check():
    with pytest.raises(OutOfInterval):
        entropy_decomposition_check(np.exp, (0.0, 1.0), 1.0)


@given(st.floats(-0.99, 0.99), st.sampled_from([np.cosh, np.sin, lambda u: u**4]))
def test_decomposition_with_numerical_derivatives(u, Phi):
    lhs, rhs = entropy_decomposition_check(Phi, (-1.0, 1.0), u)
    assert abs(lhs - rhs) <= 1e-8


# ---- change of variables -----------------------------------------------------


def test_change_of_variables_linear_eta():
    fp = make_flux_pair("linear", (-1.0, 1.0), eta_scale=2.0)
    u0 = GridFunction.from_callable(Grid1D(-1, 2, 150), riemann_data(0.5, -0.5))
    assert change_of_variables_check(fp, u0, "viscous", 0.5) <= 1e-10


@pytest.mark.parametrize("method", ["viscous", "godunov"])
def test_change_of_variables_exp_pair(method):
    f = get_fixture("exp_pair_riemann")
    dists = [change_of_variables_check(f.fp, f.initial(n), method, 1.0) for n in (100, 200, 400)]
    assert dists[-1] <= 0.05
    if method == "godunov":
        # both formulations run the same update of v = eta(u), so the distance is zero at every h
        tv = float(np.exp(0.5) - np.exp(-0.5))
        assert dists[0] >= dists[1] >= dists[2]
        assert dists[-1] <= 2 * (4.0 / 400) * tv
    else:
        assert dists[0] > dists[1] > dists[2]
