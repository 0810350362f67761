"""Independent reference evaluations used by the test suite.

The Cartesian oracle integrates the frequency-plane integrals directly in
(xi, eta) coordinates as iterated 1-D quadratures: for each xi, the eta
integral rides on panels graded around the mixing ridge eta = t xi (the
Lorentzian has width |xi|), and the xi integral rides on panels graded by
the 1/xi phase oscillation.  A plain uniform Riemann sum cannot converge
here -- the integrand carries an integrable 1/xi ridge -- so the oracle
instead verifies its own small-|xi| cutoff by halving it twice and checking
consistency.  Nothing here uses the polar-coordinate machinery under test.
"""

from __future__ import annotations

import math

import numpy as np
from numpy.polynomial.legendre import leggauss

_X8, _W8 = leggauss(8)


def _panels(breakpoints, f):
    lo = breakpoints[:-1]
    hi = breakpoints[1:]
    half = 0.5 * (hi - lo)
    nodes = (0.5 * (hi + lo)[:, None] + half[:, None] * _X8[None, :]).ravel()
    wts = (half[:, None] * _W8[None, :]).ravel()
    return np.dot(f(nodes), wts)


def _eta_breakpoints(t, xi, y, eta_max):
    """Panels graded for the Lorentzian ridge at eta = t xi, for the
    1/xi-fast phase (equal-arctan increments in zeta = eta/xi for both
    arctangent branches), and for the e^{i eta y} oscillation."""
    center = t * xi
    w = abs(xi)
    fams = [np.array([center]),
            np.linspace(-eta_max, eta_max, 96)]
    widths = w * np.geomspace(1.0 / 32.0, max(2.0, (eta_max + abs(center)) / max(w, 1e-300)), 48)
    fams += [center + widths, center - widths]
    # phase panels: |Phi_eta| ~ |psi'(zeta)|/xi^2; equal-arctan zeta nodes
    m = int(min(16384, max(48, 2.5 / w)))
    u = np.linspace(-math.pi / 2.0, math.pi / 2.0, m + 2)[1:-1]
    zeta = np.tan(u)
    fams += [xi * zeta, xi * (t - zeta)]
    if abs(y) > 1e-12:
        n = int(min(4096, 3.0 * abs(y) * eta_max / math.pi)) + 1
        if n > 1:
            fams.append(np.linspace(-eta_max, eta_max, n + 1))
    bp = np.unique(np.clip(np.concatenate(fams), -eta_max, eta_max))
    return bp


def _eta_integral(t, xi, z, y, data_hat, which, eta_max):
    bp = _eta_breakpoints(t, xi, y, eta_max)

    def f(eta):
        den = xi * xi + (eta - t * xi) ** 2
        num = xi if which == "z" else eta
        zeta = eta / xi
        phi = np.arctan2(t, 1.0 - zeta * (t - zeta)) / xi
        return 1j * num / den * data_hat(xi, eta) * np.exp(1j * (xi * z + eta * y + phi))

    return _panels(bp, f)


def _xi_half_axis(t, sgn, z, y, data_hat, which, xi_min, xi_max, eta_max):
    """Integral over sgn * [xi_min, xi_max] with 1/xi phase grading."""
    c_phase = math.pi  # |Phi| <= pi/|xi|; grade by that envelope
    total = c_phase * (1.0 / xi_min - 1.0 / xi_max) + abs(z) * (xi_max - xi_min)
    n_osc = max(8, int(total / (2.0 * math.pi * 1.5)))
    ks = np.arange(1, n_osc) * (total / n_osc)
    # invert c/xi_min - c/x + |z| (x - xi_min) = k for breakpoints
    A = abs(z)
    B = c_phase
    if A > 0:
        cc = ks + A * xi_min - B / xi_min
        x = (cc + np.sqrt(cc * cc + 4.0 * A * B)) / (2.0 * A)
    else:
        x = 1.0 / (1.0 / xi_min - ks / B)
    bp = np.unique(np.clip(np.concatenate([[xi_min, xi_max], x,
                                           np.linspace(xi_min, xi_max, 64)]),
                           xi_min, xi_max))

    def f(xs):
        return np.array([_eta_integral(t, sgn * x_, z, y, data_hat, which, eta_max)
                         for x_ in xs])

    return _panels(bp, f)


def cartesian_profile_oracle(t, z, y, data_hat, which="z", xi_min=2e-3,
                             xi_max=14.0, eta_max=14.0, check=True):
    """(phi_z or phi_y)(t, z, y) by iterated Cartesian quadrature.

    With check=True the |xi| < xi_min cutoff is halved twice and the three
    values are required to agree, confirming the oscillatory strip is
    negligible; returns (value, spread)."""
    def run(ximin):
        v = 0j
        for sgn in (1.0, -1.0):
            v += _xi_half_axis(t, sgn, z, y, data_hat, which, ximin, xi_max, eta_max)
        return v / (2.0 * math.pi) ** 3

    v0 = run(xi_min)
    if not check:
        return v0, math.nan
    v1 = run(0.5 * xi_min)
    return v1, 2.0 * abs(v0 - v1)


def cartesian_vorticity_oracle(t, z, y, data_hat, xi_min=2e-3, xi_max=14.0,
                               eta_max=14.0):
    """f(t, z, y) by the same iterated scheme (multiplier-free)."""
    def _eta(xi):
        bp = _eta_breakpoints(t, xi, y, eta_max)

        def f(eta):
            zeta = eta / xi
            phi = np.arctan2(t, 1.0 - zeta * (t - zeta)) / xi
            return data_hat(xi, eta) * np.exp(1j * (xi * z + eta * y + phi))

        return _panels(bp, f)

    def run(ximin):
        out = 0j
        for sgn in (1.0, -1.0):
            cps = math.pi * (1.0 / ximin - 1.0 / xi_max)
            n_osc = max(8, int(cps / (2.0 * math.pi * 1.5)))
            ks = np.arange(1, n_osc) * (cps / n_osc)
            x = 1.0 / (1.0 / ximin - ks / math.pi)
            bp = np.unique(np.concatenate([[ximin, xi_max], x,
                                           np.linspace(ximin, xi_max, 64)]))
            out += _panels(bp, lambda xs: np.array([_eta(sgn * x_) for x_ in xs]))
        return out / (2.0 * math.pi) ** 2

    return run(xi_min)
