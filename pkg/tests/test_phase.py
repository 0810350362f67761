import math

import numpy as np
import pytest
from scipy.integrate import quad

from betaplane.phase import (PhaseSample, gamma_derivs, h_eval, multipliers,
                             phase_gradient, psi_eval)


def fd5(f, x, h):
    """5-point central difference."""
    return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h)


class TestPsi:
    def test_basic_values(self):
        psi, _, _ = psi_eval(1.0, 0.0)
        assert psi == pytest.approx(math.pi / 4, abs=1e-15)
        psi, p1, _ = psi_eval(2.0, 1.0)
        assert psi == pytest.approx(math.pi / 2, abs=1e-15)
        assert p1 == pytest.approx(0.0, abs=1e-15)  # symmetric about zeta = t/2

    def test_reflection_formula(self):
        # for |1/zeta| < 1/(2t) the sign terms cancel in the inversion formula
        t, zeta = 3.0, 10.0
        psi, _, _ = psi_eval(t, zeta)
        z = 1.0 / zeta
        refl = math.atan(z / (1.0 - t * z)) - math.atan(z)
        assert psi == pytest.approx(refl, abs=1e-12)

    def test_positive_and_reciprocal_convex(self):
        for t in (0.5, 1.0, 10.0, 1e3):
            z = np.linspace(-50 * t, 50 * t, 20001)
            psi, p1, p2 = psi_eval(t, z)
            assert np.all(psi > 0.0)
            assert np.all(2.0 * p1**2 - psi * p2 > 0.0)

    def test_derivatives_match_finite_differences(self):
        t = 7.0
        for z0 in (-3.0, 0.0, 0.7, t / 2, t, 40.0):
            _, p1, p2 = psi_eval(t, z0)
            step = 1e-4 * max(1.0, abs(z0))
            fd1 = fd5(lambda z: psi_eval(t, z)[0], z0, step)
            fd2 = fd5(lambda z: psi_eval(t, z)[1], z0, step)
            assert p1 == pytest.approx(fd1, rel=1e-8, abs=1e-12)
            assert p2 == pytest.approx(fd2, rel=1e-7, abs=1e-12)

    def test_rejects_nonpositive_t(self):
        with pytest.raises(ValueError):
            psi_eval(0.0, 1.0)
        with pytest.raises(ValueError):
            psi_eval(-1.0, 1.0)


class TestH:
    def test_quarter_circle_values(self):
        assert h_eval(1.0, math.pi / 2).h == pytest.approx(math.pi / 4, rel=1e-14)
        assert h_eval(1.0, 3 * math.pi / 2).h == pytest.approx(-math.pi / 4, rel=1e-14)

    def test_series_anchor_at_zero(self):
        s = h_eval(5.0, 0.0)
        assert s.h == 0.0
        assert s.h1 == pytest.approx(5.0, rel=1e-14)
        assert s.h2 == pytest.approx(50.0, rel=1e-13)  # 2 t^2

    def test_antiperiodic(self):
        th = np.linspace(-2.0, 2.0, 401)
        for t in (0.7, 3.0, 200.0):
            a = h_eval(t, th)
            b = h_eval(t, th + math.pi)
            np.testing.assert_allclose(b.h, -a.h, rtol=1e-12, atol=1e-14)
            np.testing.assert_allclose(np.abs(b.h1), np.abs(a.h1), rtol=1e-11, atol=1e-12)

    def test_matches_psi_form(self):
        # h = csc(theta) psi(cot theta) away from theta = 0 mod pi
        for t in (0.5, 2.0, 50.0, 1e4):
            th = np.linspace(0.03, math.pi - 0.03, 997)
            s = h_eval(t, th)
            psi = psi_eval(t, 1.0 / np.tan(th))[0]
            np.testing.assert_allclose(s.h, psi / np.sin(th), rtol=1e-10)

    def test_two_formulas_agree_on_overlap(self):
        from betaplane.phase import _h_cot_eval, _h_log_eval

        for t in (0.5, 1.0, 5.0, 100.0, 1e4):
            th = np.linspace(0.055, 0.3, 400)
            a = _h_cot_eval(t, th)
            b = _h_log_eval(t, th)
            for x, y in zip(a, b):
                np.testing.assert_allclose(x, y, rtol=1e-10)

    def test_derivatives_match_finite_differences(self):
        for t in (1.0, 30.0, 1e3):
            for th0 in (0.3, 1.2, 2.9, 1.0 / t + 0.5 / t**2, -0.04):
                s = h_eval(t, th0)
                # the local feature scale collapses to 1/t^2 at the critical ray
                step = 1e-4 * max(abs(th0 - 1.0 / t), 1.0 / t**2)
                fd1 = fd5(lambda x: h_eval(t, x).h, th0, step)
                fd2 = fd5(lambda x: h_eval(t, x).h1, th0, step)
                assert s.h1 == pytest.approx(fd1, rel=1e-6)
                assert s.h2 == pytest.approx(fd2, rel=1e-6)

    def test_finite_everywhere(self):
        th = np.linspace(-7.0, 7.0, 20011)
        for t in (1e-2, 1.0, 1e4):
            s = h_eval(t, th)
            assert np.all(np.isfinite(s.h))
            assert np.all(np.isfinite(s.h1))
            assert np.all(np.isfinite(s.h2))

    def test_t_zero_vanishes(self):
        s = h_eval(0.0, np.array([0.3, 2.0]))
        np.testing.assert_array_equal(s.h, 0.0)


class TestMultipliers:
    def test_axis_values(self):
        m = multipliers(3.0, math.pi / 2)
        assert m.mz == pytest.approx(1.0 / 10.0, rel=1e-15)
        assert m.my == pytest.approx(0.0, abs=1e-15)

    def test_critical_ray_value(self):
        # cos - t sin vanishes at tan(theta) = 1/t, leaving mz = 1/sin
        t = 3.0
        th = math.atan(1.0 / t)
        assert multipliers(t, th).mz == pytest.approx(math.sqrt(10.0), rel=1e-14)

    def test_ratio_identity(self):
        m = multipliers(4.0, 0.2)
        assert m.mz / m.my == pytest.approx(math.tan(0.2), rel=1e-13)

    def test_derivatives_match_finite_differences(self):
        for t in (1.0, 40.0, 2e3):
            for th0 in (0.5, 1.0 / t, 1.0 / t + 1.0 / t**2, -1.1):
                m = multipliers(t, th0)
                step = 1e-4 * max(abs(th0 - 1.0 / t), 1.0 / t**2)
                fdz = fd5(lambda x: multipliers(t, x).mz, th0, step)
                fdy = fd5(lambda x: multipliers(t, x).my, th0, step)
                assert m.dmz == pytest.approx(fdz, rel=2e-6, abs=1e-10)
                assert m.dmy == pytest.approx(fdy, rel=2e-6, abs=1e-10)


class TestGamma:
    def test_expansion_at_zero(self):
        g = gamma_derivs(5.0, 0.0)
        assert g.g1 == pytest.approx(-5.0 + 0.0j, abs=1e-12)
        assert g.g2 == pytest.approx(-50.0 + 10.0j, abs=1e-10)
        assert g.curv == pytest.approx(-50.0, rel=1e-12)  # -2 t^2
        assert g.w == pytest.approx(math.pi, abs=1e-15)

    def test_curvature_negative_on_grid(self):
        for t in (0.3, 1.0, 42.0, 1e4):
            th = np.linspace(-math.pi, math.pi, 10007)
            g = gamma_derivs(t, th)
            assert np.max(g.curv) < 0.0
            assert np.all(g.wp < 0.0)

    def test_lift_monotone_and_winding(self):
        for t in (2.0, 117.0):
            th = np.linspace(0.0, math.pi, 4001)
            g = gamma_derivs(t, th)
            assert np.all(np.diff(g.w) < 0.0)
            assert g.w[-1] - g.w[0] == pytest.approx(-2 * math.pi, abs=1e-12)
        inc = gamma_derivs(2.0, 5.0).w - gamma_derivs(2.0, 5.0 - math.pi).w
        assert inc == pytest.approx(-2 * math.pi, abs=1e-8)

    def test_lift_matches_quadrature_of_wp(self):
        # independent construction: integrate wp from 0 with anchor pi
        t = 7.0
        for th0 in (0.4, 1.3, 2.8):
            val = quad(lambda x: gamma_derivs(t, x).wp, 0.0, th0,
                       points=[1.0 / t], limit=200)[0]
            assert math.pi + val == pytest.approx(gamma_derivs(t, th0).w, abs=1e-9)

    def test_wp_matches_finite_differences(self):
        for t in (3.0, 300.0):
            for th0 in (0.8, 1.0 / t + 2.0 / t**2):
                g = gamma_derivs(t, th0)
                step = 1e-4 * max(abs(th0 - 1.0 / t), 1.0 / t**2)
                fd = fd5(lambda x: gamma_derivs(t, x).w, th0, step)
                assert g.wp == pytest.approx(fd, rel=1e-6)

    def test_gamma_prime_inverse_scale_at_critical(self):
        # |gamma'(1/t)| grows like t^3 over a decade sweep
        from betaplane.regions import scaling_fit

        ts = np.geomspace(1e2, 1e4, 5)
        vals = [(t, 1.0 / abs(gamma_derivs(t, 1.0 / t).g1)) for t in ts]
        fit = scaling_fit(vals)
        assert fit.exponent == pytest.approx(-3.0, abs=0.05)


class TestPhaseGradient:
    def test_direct_value(self):
        pg = phase_gradient(1.0, 1.0, 0.0, 1.0, math.pi / 2)
        assert pg.psi == pytest.approx(1.0 + math.pi / 4, rel=1e-14)

    def test_rho_zero(self):
        s = h_eval(2.0, 0.7)
        pg = phase_gradient(2.0, 0.0, 0.3, 1.5, 0.7)
        assert pg.dr == pytest.approx(-s.h / 1.5**2, rel=1e-14)

    def test_gradient_identities_on_grid(self):
        t, rho, alpha = 3.0, 1.3, 0.8
        r = np.linspace(0.3, 4.0, 7)
        th = np.linspace(0.1, 6.0, 7)
        s = h_eval(t, th)
        pg = phase_gradient(t, rho, alpha, r, th)
        np.testing.assert_allclose(pg.dr, rho * np.sin(th + alpha) - s.h / r**2,
                                   rtol=1e-13)
        np.testing.assert_allclose(pg.dtheta, rho * r * np.cos(th + alpha) + s.h1 / r,
                                   rtol=1e-13)

    def test_rejects_bad_inputs(self):
        with pytest.raises(ValueError):
            phase_gradient(1.0, -1.0, 0.0, 1.0, 0.0)
        with pytest.raises(ValueError):
            phase_gradient(1.0, 1.0, 0.0, 0.0, 0.0)
