"""Constructive inversion of the stationary-phase condition.

For a physical-space point written ``z + i y = rho e^{i alpha}``, the polar
phase ``Psi(r, theta) = rho r sin(theta + alpha) + h(theta)/r`` is
stationary exactly where ``rho e^{i alpha} = gamma'(theta) / r^2``.  Since
the lifted angle ``W(theta) = Arg gamma'(theta)`` is strictly decreasing and
drops by ``2 pi`` over ``[0, pi)``, the angular equation ``W(theta) = alpha``
has a unique root there, and the radius is ``r = sqrt(|gamma'| / rho)``.
The second stationary point is the antipode ``(r, theta + pi)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .phase import gamma_derivs, phase_gradient, _check_time

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class StationaryPair:
    """One stationary point of Psi and the gradient norm achieved there."""

    theta: float
    r: float
    grad_norm: float


def _wrap_angle(alpha: float) -> float:
    """Reduce alpha to the principal range (-pi, pi]."""
    a = math.fmod(alpha, _TWO_PI)
    if a > math.pi:
        a -= _TWO_PI
    elif a <= -math.pi:
        a += _TWO_PI
    return a


def lift_residual(t: float, theta: float, alpha: float) -> float:
    """|W_t(theta) - alpha| measured mod 2 pi."""
    w = gamma_derivs(t, theta).w
    return abs(_wrap_angle(w - alpha))


def invert_w(t: float, alpha: float, *, max_iter: int = 60, newton_steps: int = 3) -> float:
    """Solve W_t(theta) = alpha (mod 2 pi) for theta in [0, pi).

    Bisection on the monotone lift (wp < 0 guarantees a bracket), then a few
    Newton polish steps using wp.  Raises if the initial bracket fails,
    which would contradict bijectivity of W.
    """
    t = _check_time(t)
    a = _wrap_angle(alpha)
    if a == math.pi:
        return 0.0

    lo, hi = 0.0, math.pi * (1.0 - 1e-15)
    w_lo = gamma_derivs(t, lo).w
    w_hi = gamma_derivs(t, hi).w
    if not (w_lo >= a >= w_hi):
        raise ArithmeticError(
            f"failed to bracket W(theta) = {a}; got W({lo}) = {w_lo}, W({hi}) = {w_hi}"
        )
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if gamma_derivs(t, mid).w >= a:
            lo = mid
        else:
            hi = mid
    # Newton polish; clamp only to the fundamental domain (the bisection
    # bracket is already tighter than a float step, clamping to it would
    # freeze the iterate), keep the best residual seen.
    theta = 0.5 * (lo + hi)
    best, best_res = theta, abs(_wrap_angle(gamma_derivs(t, theta).w - a))
    for _ in range(newton_steps):
        g = gamma_derivs(t, theta)
        theta = theta - _wrap_angle(g.w - a) / g.wp
        theta = min(max(theta, 0.0), math.pi * (1.0 - 1e-16))
        res = abs(_wrap_angle(gamma_derivs(t, theta).w - a))
        if res < best_res:
            best, best_res = theta, res
    theta = best
    if theta >= math.pi:
        theta -= math.pi
    return theta


def stationary_points(t: float, rho: float, alpha: float) -> tuple[StationaryPair, StationaryPair]:
    """Both stationary points of Psi for the point rho e^{i alpha}.

    theta does not depend on rho; r scales like rho^{-1/2}.
    """
    t = _check_time(t)
    rho = float(rho)
    if rho <= 0.0:
        raise ValueError("rho must be positive (stationary radius diverges at rho = 0)")
    theta = invert_w(t, alpha)
    g = gamma_derivs(t, theta)
    r = math.sqrt(abs(g.g1) / rho)

    def _pair(th: float) -> StationaryPair:
        grad = phase_gradient(t, rho, alpha, r, th)
        return StationaryPair(th, r, math.hypot(grad.dr, grad.dtheta / r))

    return _pair(theta), _pair(theta + math.pi)
