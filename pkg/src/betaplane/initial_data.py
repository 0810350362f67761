"""Initial Fourier vorticity data and its weighted norms.

The polar form follows the frequency convention ``xi + i eta = r e^{i(pi/2
- theta)}``, i.e. ``xi = r sin(theta)``, ``eta = r cos(theta)``; ``v(r,
theta)`` is the Cartesian data composed with that map.  Decay-rate
statements weight the data by ``<p> = sqrt(1 + |p|^2)`` powers, so every
dataset records numerically estimated sup norms of ``<.>^5 data`` and
``<.>^6 grad(data)`` plus a tail radius rule for truncating the radial
integrals.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np


def _smoothstep(x):
    """C-infinity step: 0 for x <= 0, 1 for x >= 1."""
    x = np.asarray(x, dtype=float)
    a = np.zeros_like(x)
    pos = x > 0.0
    inner = pos & (x < 1.0)
    with np.errstate(over="ignore"):
        fa = np.where(inner, np.exp(-1.0 / np.where(inner, x, 1.0)), 0.0)
        fb = np.where(inner, np.exp(-1.0 / np.where(inner, 1.0 - x, 1.0)), 0.0)
    a[inner] = fa[inner] / (fa[inner] + fb[inner])
    a[x >= 1.0] = 1.0
    return a


@dataclass
class InitialData:
    """Fourier-side initial vorticity with numerically estimated norms.

    tail_model controls radial truncation: "gauss" for data dominated by
    exp(-r^2/2), "compact" for support inside support_radius, "poly" for
    the generic <r>^-5 envelope guaranteed by a finite norm5.
    """

    name: str
    omega0_hat: Callable[[np.ndarray, np.ndarray], np.ndarray]
    grad_hat: Callable[[np.ndarray, np.ndarray], tuple] | None = None
    norm5: float = 0.0          # sup <xi,eta>^5 |omega0_hat|
    norm6_grad: float = 0.0     # sup <xi,eta>^6 |grad omega0_hat|
    support_radius: float | None = None
    tail_model: str = "poly"

    def v(self, r, theta):
        r = np.asarray(r, dtype=float)
        theta = np.asarray(theta, dtype=float)
        return self.omega0_hat(r * np.sin(theta), r * np.cos(theta))

    def dv_dr(self, r, theta, eps: float = 1e-6):
        """Radial derivative of v; analytic when grad_hat is supplied."""
        r = np.asarray(r, dtype=float)
        s, c = np.sin(theta), np.cos(theta)
        if self.grad_hat is not None:
            gx, ge = self.grad_hat(r * s, r * c)
            return gx * s + ge * c
        h = eps * np.maximum(1.0, r)
        return (self.v(r + h, theta) - self.v(r - h, theta)) / (2.0 * h)

    def tail_radius(self, tol: float) -> float:
        """Radius beyond which the weighted radial tail of r |v| is below tol."""
        tol = max(tol, 1e-300)
        if self.tail_model == "compact" and self.support_radius is not None:
            return self.support_radius
        if self.tail_model == "gauss":
            return max(4.0, math.sqrt(-2.0 * math.log(tol)) + 1.0)
        # int_R^inf r <r>^-5 dr ~ 1/(3 R^3) for R >> 1
        R = (max(self.norm5, 1.0) / (3.0 * tol)) ** (1.0 / 3.0)
        return max(4.0, R)

    def tail_mass(self, R: float, pow_r: int) -> float:
        """Upper estimate of int_R^inf r^pow sup_theta |v| dr."""
        if self.tail_model == "compact" and self.support_radius is not None:
            return 0.0 if R >= self.support_radius else self.norm5 * (self.support_radius - R)
        if self.tail_model == "gauss":
            return math.exp(-0.5 * R * R) * (1.0 if pow_r else 1.0 / R)
        n5 = max(self.norm5, 1.0)
        return n5 / (3.0 * R**3) if pow_r else n5 / (4.0 * R**4)


def estimate_norms(omega0_hat, grad_hat=None, r_max: float = 40.0, n: int = 400):
    """Grid estimates of the two weighted sup norms."""
    r = np.linspace(0.0, r_max, n)
    th = np.linspace(0.0, 2.0 * math.pi, n, endpoint=False)
    R, TH = np.meshgrid(r, th, indexing="ij")
    xi = R * np.sin(TH)
    eta = R * np.cos(TH)
    w = np.sqrt(1.0 + xi**2 + eta**2)
    n5 = float(np.max(w**5 * np.abs(omega0_hat(xi, eta))))
    if grad_hat is None:
        return n5, math.nan
    gx, ge = grad_hat(xi, eta)
    n6 = float(np.max(w**6 * np.hypot(np.abs(gx), np.abs(ge))))
    return n5, n6


def gaussian_data() -> InitialData:
    """Unit Gaussian omega0_hat = exp(-(xi^2 + eta^2)/2)."""

    def f(xi, eta):
        return np.exp(-0.5 * (np.asarray(xi) ** 2 + np.asarray(eta) ** 2))

    def g(xi, eta):
        base = f(xi, eta)
        return -xi * base, -eta * base

    n5, n6 = estimate_norms(f, g)
    return InitialData("gaussian", f, g, n5, n6, tail_model="gauss")


def bump_data(radius: float = 3.0) -> InitialData:
    """Compactly supported radial bump exp(1 - 1/(1 - (|p|/radius)^2))."""

    def f(xi, eta):
        s2 = (np.asarray(xi) ** 2 + np.asarray(eta) ** 2) / radius**2
        out = np.zeros_like(s2)
        inside = s2 < 1.0
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - s2[inside]))
        return out

    n5, _ = estimate_norms(f, None, r_max=radius)
    return InitialData("bump", f, None, n5, math.nan,
                       support_radius=radius, tail_model="compact")


def cone_data() -> InitialData:
    """Gaussian profile cut smoothly to the sector |xi| >= 1 + |eta|,
    where mixing alone already gives strong decay."""

    def f(xi, eta):
        xi = np.asarray(xi, dtype=float)
        eta = np.asarray(eta, dtype=float)
        cut = _smoothstep(np.abs(xi) - 1.0 - np.abs(eta))
        return cut * np.exp(-0.5 * (xi**2 + eta**2) / 16.0)

    n5, _ = estimate_norms(f, None)
    return InitialData("cone", f, None, n5, math.nan)
