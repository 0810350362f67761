import math

import numpy as np
import pytest

from betaplane.phase import gamma_derivs, phase_gradient
from betaplane.stationary import invert_w, lift_residual, stationary_points


def test_invert_alpha_pi_is_zero():
    assert invert_w(5.0, math.pi) == 0.0


def test_roundtrip_single_point():
    w = gamma_derivs(2.0, 0.7).w
    assert invert_w(2.0, w) == pytest.approx(0.7, abs=1e-9)


@pytest.mark.parametrize("t", [1.0, 13.0, 1000.0])
def test_roundtrip_grid(t):
    thetas = np.linspace(0.0, math.pi, 41, endpoint=False)
    for th0 in thetas:
        w = gamma_derivs(t, th0).w
        assert invert_w(t, w) == pytest.approx(th0, abs=1e-9)


def test_residuals_random_alpha():
    rng = np.random.default_rng(7)
    for _ in range(100):
        t = float(10 ** rng.uniform(0, 3))
        alpha = float(rng.uniform(-10.0, 10.0))
        th = invert_w(t, alpha)
        assert 0.0 <= th < math.pi
        g = gamma_derivs(t, th)
        # residual floor: one float step of theta moves w by |wp| ulp(theta)
        floor = 8.0 * abs(g.wp) * np.spacing(max(th, 0.1))
        assert lift_residual(t, th, alpha) < max(1e-10, floor)


def test_stationary_point_values():
    p1, p2 = stationary_points(5.0, 1.0, math.pi)
    assert p1.theta == pytest.approx(0.0, abs=1e-12)
    assert p1.r == pytest.approx(math.sqrt(5.0), rel=1e-12)
    assert p2.theta == pytest.approx(math.pi, abs=1e-12)


def test_theta_independent_of_rho_and_r_scaling():
    a, _ = stationary_points(3.0, 4.0, 1.1)
    b, _ = stationary_points(3.0, 1.0, 1.1)
    assert a.theta == b.theta
    assert a.r == pytest.approx(b.r / 2.0, rel=1e-13)


def test_gradient_vanishes_at_both_points():
    p1, p2 = stationary_points(50.0, 2.0, 1.3)
    g = gamma_derivs(50.0, p1.theta)
    tol = 1e-9 * (1.0 + 2.0) * max(1.0, abs(g.g1))
    assert p1.grad_norm < tol
    assert p2.grad_norm < tol


def test_gradient_vanishes_random_draws():
    rng = np.random.default_rng(11)
    for _ in range(60):
        t = float(10 ** rng.uniform(0, 4))
        rho = float(10 ** rng.uniform(-1, 1))
        alpha = float(rng.uniform(-7, 7))
        p1, p2 = stationary_points(t, rho, alpha)
        g = gamma_derivs(t, p1.theta)
        tol = 1e-9 * (1.0 + rho) * max(1.0, abs(g.g1))
        assert max(p1.grad_norm, p2.grad_norm) < tol


def test_antipode_gradient_identity():
    # h(theta + pi) = -h(theta) makes the gradient flip sign exactly
    t, rho, alpha = 7.0, 0.8, 2.1
    p1, _ = stationary_points(t, rho, alpha)
    g_here = phase_gradient(t, rho, alpha, p1.r, p1.theta)
    g_there = phase_gradient(t, rho, alpha, p1.r, p1.theta + math.pi)
    assert g_there.dr == pytest.approx(-g_here.dr, abs=1e-12)
    assert g_there.dtheta == pytest.approx(-g_here.dtheta, abs=1e-12)


def test_rejects_rho_zero():
    with pytest.raises(ValueError):
        stationary_points(2.0, 0.0, 1.0)
