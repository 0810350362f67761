import math

import numpy as np
import pytest

from betaplane.initial_data import bump_data, cone_data, gaussian_data


def test_polar_cartesian_consistency():
    rng = np.random.default_rng(3)
    for data in (gaussian_data(), bump_data(), cone_data()):
        r = rng.uniform(0.1, 4.0, 50)
        th = rng.uniform(0.0, 2 * math.pi, 50)
        direct = data.omega0_hat(r * np.sin(th), r * np.cos(th))
        np.testing.assert_allclose(data.v(r, th), direct, rtol=0, atol=1e-12)


def test_gaussian_norms_finite():
    data = gaussian_data()
    assert 0.0 < data.norm5 < 50.0
    assert 0.0 < data.norm6_grad < 200.0
    # analytic max of <r>^5 exp(-r^2/2) at r^2 = 4
    expect = 5.0**2.5 * math.exp(-2.0)
    assert data.norm5 == pytest.approx(expect, rel=1e-3)


def test_gaussian_radial_derivative():
    data = gaussian_data()
    r = np.array([0.5, 1.5])
    th = np.array([0.3, 2.0])
    np.testing.assert_allclose(data.dv_dr(r, th), -r * np.exp(-0.5 * r * r),
                               rtol=1e-12)


def test_bump_support():
    data = bump_data(radius=3.0)
    assert data.omega0_hat(np.array([3.1]), np.array([0.0]))[0] == 0.0
    assert data.omega0_hat(np.array([0.0]), np.array([0.0]))[0] == pytest.approx(1.0)
    assert data.tail_radius(1e-8) == 3.0
    assert data.tail_mass(3.0, 1) == 0.0


def test_cone_support():
    data = cone_data()
    xi = np.array([0.5, 2.0, 3.0])
    eta = np.array([0.0, 0.5, 2.5])
    vals = data.omega0_hat(xi, eta)
    assert vals[0] == 0.0          # |xi| < 1 + |eta|
    assert vals[1] > 0.0           # |xi| = 2 > 1.5
    assert vals[2] == 0.0          # 3 < 3.5
    # smooth: no values outside [0, 1]
    g = np.linspace(-6, 6, 201)
    XI, ETA = np.meshgrid(g, g)
    v = data.omega0_hat(XI, ETA)
    assert np.all((v >= 0.0) & (v <= 1.0))


def test_tail_radius_scales():
    data = gaussian_data()
    assert data.tail_radius(1e-4) < data.tail_radius(1e-10)
    assert data.tail_mass(6.0, 0) < 1e-7
