"""Branch-safe evaluation of the shear-phase functions.

Everything in this toolkit is driven by a handful of scalar functions of the
shear time ``t`` and the frequency angle ``theta`` (measured from the eta
axis, so the mixing degeneracy sits at ``theta ~ 1/t``):

* ``psi(z) = arctan(t - z) + arctan(z)``, the phase in homogeneous
  coordinates ``z = cot(theta)``,
* ``h(theta) = psi(cot theta) / sin(theta)``, the angular phase profile,
* the mixing multipliers ``m_z``, ``m_y``,
* the complex curve ``gamma(theta) = -exp(-i theta) h(theta)`` whose
  derivative encodes the stationary points, and its lifted argument ``W``.

The naive formulas cancel catastrophically near ``theta = 0 mod pi`` (the
two arctangents approach ``+-pi/2``) and near the critical ray
``theta = 1/t``.  Three evaluation branches keep full double precision:

1. ``|sin theta| >= 0.05``: the cot/csc formulas, with ``psi`` and its
   derivatives rewritten in cancellation-free product form.
2. ``min(0.01, 1/(10 t)) <= |theta mod pi| < 0.05``: a complex-logarithm
   form ``h = Im log(1 - t sin(theta) exp(-i theta)) / sin(theta)``, whose
   argument stays in the closed upper half plane for every theta.
3. ``|theta mod pi| < min(0.01, 1/(10 t))``: a power series in theta whose
   coefficients are generated per ``t`` from the exact rational recurrence
   for ``psi(1/z)``; in this zone ``t * theta <= 0.1`` so the series
   converges geometrically and the division by ``sin(theta)`` is done at
   the coefficient level (no cancellation).

All functions accept scalars or numpy arrays in ``theta`` and are pure.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import polynomial as npoly

_SIN_SWITCH = 0.05      # below this |sin theta| the cot/csc route loses digits
_SERIES_ABS = 0.01      # series zone: |theta mod pi| < min(_SERIES_ABS, 1/(10 t))
_SERIES_DEGREE = 22     # series in theta*h, t*theta <= 0.1 so terms decay ~10x


def _check_time(t: float, *, positive: bool = True) -> float:
    t = float(t)
    if positive and not t > 0.0:
        raise ValueError(f"shear time must be positive, got {t}")
    if not positive and t < 0.0:
        raise ValueError(f"shear time must be nonnegative, got {t}")
    if not np.isfinite(t):
        raise ValueError("shear time must be finite")
    return t


@dataclass(frozen=True)
class PhaseSample:
    """Angular phase profile and its first two theta-derivatives."""

    theta: np.ndarray | float
    h: np.ndarray | float
    h1: np.ndarray | float
    h2: np.ndarray | float


@dataclass(frozen=True)
class MultiplierSample:
    """Mixing multipliers m_z, m_y and their theta-derivatives."""

    theta: np.ndarray | float
    mz: np.ndarray | float
    my: np.ndarray | float
    dmz: np.ndarray | float
    dmy: np.ndarray | float


@dataclass(frozen=True)
class GammaSample:
    """First two derivatives of the stationary curve and its lifted angle.

    ``curv = Im[conj(g1) g2]`` is strictly negative, so the lift ``w`` is
    strictly decreasing with ``w(0) = pi`` and drops by ``2 pi`` over every
    period ``pi`` in theta.
    """

    theta: np.ndarray | float
    g1: np.ndarray | complex
    g2: np.ndarray | complex
    curv: np.ndarray | float
    w: np.ndarray | float
    wp: np.ndarray | float


@dataclass(frozen=True)
class PhaseGradient:
    """Value and polar gradient of Psi = rho r sin(theta+alpha) + h/r."""

    psi: np.ndarray | float
    dr: np.ndarray | float
    dtheta: np.ndarray | float


def _unwrap(scalar_in: bool, *arrays):
    out = tuple(a[0] if scalar_in else a for a in arrays)
    return out if len(out) > 1 else out[0]


def psi_eval(t: float, zeta):
    """Evaluate psi(z) = arctan(t - z) + arctan(z) and two derivatives.

    Uses the product representations
        psi  = atan2(t, 1 - z(t - z))
        psi' = t (t - 2z) / D,      D = (1 - z(t-z))^2 + t^2
        psi'' = -2t (1 + 2m + m(t^2 - 3m)) / D^2,   m = z(t - z)
    which are free of the arctangent cancellation; psi lies in (0, pi).
    """
    t = _check_time(t)
    scalar = np.ndim(zeta) == 0
    z = np.atleast_1d(np.asarray(zeta, dtype=float))
    m = z * (t - z)
    one_minus_m = 1.0 - m
    psi = np.arctan2(t, one_minus_m)
    D = one_minus_m * one_minus_m + t * t
    psi1 = t * (t - 2.0 * z) / D
    psi2 = -2.0 * t * (1.0 + 2.0 * m + m * (t * t - 3.0 * m)) / (D * D)
    return _unwrap(scalar, psi, psi1, psi2)


# -- series branch -----------------------------------------------------------

def _series_trunc_mul(a: np.ndarray, b: np.ndarray, degree: int) -> np.ndarray:
    return np.convolve(a, b)[: degree + 1]


def _series_inverse(a: np.ndarray, degree: int) -> np.ndarray:
    # power-series reciprocal, a[0] != 0
    inv = np.zeros(degree + 1)
    inv[0] = 1.0 / a[0]
    for n in range(1, degree + 1):
        k = min(n, len(a) - 1)
        inv[n] = -np.dot(a[1 : k + 1], inv[n - 1 :: -1][:k]) / a[0]
    return inv


@lru_cache(maxsize=None)
def _sin_cos_tan_series(degree: int):
    n = np.arange(degree + 1)
    fact = np.cumprod(np.concatenate(([1.0], np.arange(1.0, degree + 1))))
    sin_c = np.where(n % 2 == 1, np.where((n // 2) % 2 == 0, 1.0, -1.0) / fact, 0.0)
    cos_c = np.where(n % 2 == 0, np.where((n // 2) % 2 == 0, 1.0, -1.0) / fact, 0.0)
    tan_c = _series_trunc_mul(sin_c, _series_inverse(cos_c, degree), degree)
    # theta / sin(theta) = 1 / (sin theta / theta)
    sinc_c = sin_c[1:]  # coefficients of sin(theta)/theta
    inv_sinc = _series_inverse(np.concatenate((sinc_c, [0.0])), degree)
    return sin_c, tan_c, inv_sinc


@lru_cache(maxsize=256)
def _h_series_coeffs(t: float, degree: int = _SERIES_DEGREE) -> np.ndarray:
    """Coefficients B_n of theta * h_t(theta) = sum_{n>=2} B_n theta^n.

    psi(1/z) = arctan(z/(1-tz)) - arctan(z) has derivative
    1/(1 - 2tz + (1+t^2) z^2) - 1/(1+z^2), so its Taylor coefficients obey a
    two-term recurrence; composing with tan(theta) and multiplying by
    theta/sin(theta) yields the series of theta*h.  Valid while the series
    is only used for t*|theta| <= 0.1 (terms then decay like 10^-n).
    """
    # g_n: coefficients of 1/(1 - 2t z + (1+t^2) z^2)
    g = np.empty(degree + 1)
    g[0] = 1.0
    g[1] = 2.0 * t
    for n in range(2, degree + 1):
        g[n] = 2.0 * t * g[n - 1] - (1.0 + t * t) * g[n - 2]
    fprime = g.copy()
    n = np.arange(degree + 1)
    even = n % 2 == 0
    fprime[even] -= np.where((n[even] // 2) % 2 == 0, 1.0, -1.0)
    f = np.zeros(degree + 1)
    f[1:] = fprime[:-1] / n[1:]

    _, tan_c, inv_sinc = _sin_cos_tan_series(degree)
    # Horner composition F(tan(theta)) in truncated series arithmetic
    comp = np.zeros(degree + 1)
    comp[0] = f[degree]
    for k in range(degree - 1, -1, -1):
        comp = _series_trunc_mul(comp, tan_c, degree)
        comp[0] += f[k]
    return _series_trunc_mul(comp, inv_sinc, degree)


def _h_series_eval(t: float, theta: np.ndarray):
    B = _h_series_coeffs(t)
    ch = B[1:].copy()  # h = sum ch[k] theta^k, ch[0] = B_1 = 0
    c1 = npoly.polyder(ch)
    c2 = npoly.polyder(ch, 2)
    return npoly.polyval(theta, ch), npoly.polyval(theta, c1), npoly.polyval(theta, c2)


def _h_log_eval(t: float, theta: np.ndarray):
    # h = Im log(w)/sin, w = 1 - t sin(theta) e^{-i theta};  Im w >= 0 always
    s = np.sin(theta)
    c = np.cos(theta)
    e = np.exp(-1j * theta)
    w = 1.0 - t * s * e
    L = np.arctan2(w.imag, w.real)
    q1 = (-t * e * e) / w
    q2 = (2j * t * e * e) / w - q1 * q1
    L1 = q1.imag
    L2 = q2.imag
    h = L / s
    h1 = (L1 - h * c) / s
    h2 = (L2 - 2.0 * h1 * c + h * s) / s
    return h, h1, h2


def _h_cot_eval(t: float, theta: np.ndarray):
    s = np.sin(theta)
    csc = 1.0 / s
    z = np.cos(theta) * csc
    psi, psi1, psi2 = psi_eval(t, z) if np.ndim(z) else psi_eval(t, np.array([z]))
    csc2 = csc * csc
    csc3 = csc2 * csc
    h = csc * psi
    h1 = -csc3 * psi1 - z * csc * psi
    h2 = csc3 * csc2 * psi2 + 4.0 * z * csc3 * psi1 + (csc3 + z * z * csc) * psi
    return h, h1, h2


def h_eval(t: float, theta) -> PhaseSample:
    """Evaluate h_t and its first two derivatives, branch-safely, any theta.

    ``h(theta + pi) = -h(theta)``; the removable singularities at
    ``theta = 0 mod pi`` are filled by the series branch.
    """
    t = _check_time(t, positive=False)
    scalar = np.ndim(theta) == 0
    th = np.atleast_1d(np.asarray(theta, dtype=float))
    if t == 0.0:
        z = np.zeros_like(th)
        out = _unwrap(scalar, th, z, z.copy(), z.copy())
        return PhaseSample(theta, out[1], out[2], out[3])

    k = np.round(th / np.pi)
    tf = th - np.pi * k
    sgn = np.where(k.astype(np.int64) % 2 == 0, 1.0, -1.0)

    h = np.empty_like(tf)
    h1 = np.empty_like(tf)
    h2 = np.empty_like(tf)
    series_cut = min(_SERIES_ABS, 0.1 / t)
    a = np.abs(tf)
    m_ser = a < series_cut
    m_cot = a >= _SIN_SWITCH
    m_log = ~(m_ser | m_cot)

    if np.any(m_cot):
        h[m_cot], h1[m_cot], h2[m_cot] = _h_cot_eval(t, tf[m_cot])
    if np.any(m_log):
        h[m_log], h1[m_log], h2[m_log] = _h_log_eval(t, tf[m_log])
    if np.any(m_ser):
        h[m_ser], h1[m_ser], h2[m_ser] = _h_series_eval(t, tf[m_ser])

    h *= sgn
    h1 *= sgn
    h2 *= sgn
    hh, hh1, hh2 = _unwrap(scalar, h, h1, h2)
    th_out = theta if scalar else th
    return PhaseSample(th_out, hh, hh1, hh2)


def multipliers(t: float, theta) -> MultiplierSample:
    """Mixing multipliers m_z = sin/den, m_y = cos/den with analytic
    derivatives; den = sin^2 + (cos - t sin)^2 > 0 for all real theta."""
    t = _check_time(t, positive=False)
    scalar = np.ndim(theta) == 0
    th = np.atleast_1d(np.asarray(theta, dtype=float))
    s = np.sin(th)
    c = np.cos(th)
    u = c - t * s
    den = s * s + u * u
    du = -s - t * c
    dden = 2.0 * s * c + 2.0 * u * du
    mz = s / den
    my = c / den
    den2 = den * den
    dmz = (c * den - s * dden) / den2
    dmy = (-s * den - c * dden) / den2
    mz, my, dmz, dmy = _unwrap(scalar, mz, my, dmz, dmy)
    return MultiplierSample(theta if scalar else th, mz, my, dmz, dmy)


def gamma_derivs(t: float, theta) -> GammaSample:
    """Derivatives of gamma(theta) = -exp(-i theta) h(theta), the signed
    curvature combination, and the continuous lifted angle of gamma'.

    gamma' is pi-periodic and winds once clockwise per period, so on
    [0, pi) its principal argument *is* the monotone lift anchored at
    w(0) = pi; general theta folds by theta -> theta - k pi, w -> w - 2 pi k.
    """
    t = _check_time(t)
    scalar = np.ndim(theta) == 0
    th = np.atleast_1d(np.asarray(theta, dtype=float))
    k = np.floor(th / np.pi)
    t0 = th - np.pi * k

    ps = h_eval(t, t0)
    h, h1, h2 = np.atleast_1d(ps.h), np.atleast_1d(ps.h1), np.atleast_1d(ps.h2)
    e = np.exp(-1j * t0)
    g1 = e * (1j * h - h1)
    g2 = e * ((h - h2) + 2j * h1)
    curv = h * h2 - 2.0 * h1 * h1 - h * h
    norm2 = h * h + h1 * h1
    if np.any(norm2 == 0.0):
        raise ArithmeticError("gamma' vanished; stationary map is undefined here")
    wp = curv / norm2
    w = np.angle(g1) - 2.0 * np.pi * k

    g1, g2, curv, w, wp = _unwrap(scalar, g1, g2, curv, w, wp)
    return GammaSample(theta if scalar else th, g1, g2, curv, w, wp)


def phase_gradient(t: float, rho: float, alpha: float, r, theta) -> PhaseGradient:
    """Exact value and gradient of Psi(r, theta) = rho r sin(theta+alpha) + h/r."""
    t = _check_time(t, positive=False)
    rho = float(rho)
    if rho < 0.0:
        raise ValueError("rho must be nonnegative")
    scalar = np.ndim(r) == 0 and np.ndim(theta) == 0
    rr = np.atleast_1d(np.asarray(r, dtype=float))
    th = np.atleast_1d(np.asarray(theta, dtype=float))
    if np.any(rr <= 0.0):
        raise ValueError("r must be positive")
    rr, th = np.broadcast_arrays(rr, th)
    ps = h_eval(t, th)
    h, h1 = np.atleast_1d(ps.h), np.atleast_1d(ps.h1)
    sa = np.sin(th + alpha)
    ca = np.cos(th + alpha)
    psi = rho * rr * sa + h / rr
    dr = rho * sa - h / (rr * rr)
    dtheta = rho * rr * ca + h1 / rr
    psi, dr, dtheta = _unwrap(scalar, psi, dr, dtheta)
    return PhaseGradient(psi, dr, dtheta)
