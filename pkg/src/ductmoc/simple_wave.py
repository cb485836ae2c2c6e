"""
Closed-form expansion fan along the lower wall for a uniform
horizontal upstream state.

The fan is parametrised by the inclination ``theta`` of its straight C+
lines measured from the vertical (the C+ angle is ``theta + pi/2``).  The
sonic point of the hodograph epicycloid sits at ``theta_star``; the uniform
upstream state sits at ``theta_0 = A0 - pi/2``; vacuum is reached at
``theta_min = theta_star - pi/(2 mu)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .duct_geometry import DuctGeometry
from .errors import NonSupersonic, OutOfRange, OutOfRegion
from .gas_state import FlowState, GasConstants, density_from, derive, sound_speed


@dataclass(frozen=True)
class SimpleWaveFan:
    upstream: FlowState
    gas: GasConstants
    c_star: float
    theta_star: float
    A0: float
    theta_min: float
    theta_0: float
    E_hat: float


@dataclass(frozen=True)
class FanPoint:
    theta: float
    u: float
    v: float
    c: float
    q: float
    alpha: float
    A: float
    sigma: float
    beta: float
    state: FlowState


def build_fan(upstream: FlowState, g: GasConstants) -> SimpleWaveFan:
    if upstream.v != 0.0 or upstream.rho <= 0.0:
        raise NonSupersonic("fan needs a horizontal gas state")
    c0 = sound_speed(upstream.rho, upstream.s, g)
    u0 = upstream.u
    if not u0 > c0:
        raise NonSupersonic(f"upstream state is not supersonic (u0={u0}, c0={c0})")
    mu = g.mu
    A0 = math.asin(c0 / u0)
    c_star = math.sqrt(mu * mu * u0 * u0 + (1.0 - mu * mu) * c0 * c0)
    theta_star = A0 - 0.5 * math.pi + math.atan(mu * math.sqrt((u0 / c0) ** 2 - 1.0)) / mu
    return SimpleWaveFan(
        upstream=upstream,
        gas=g,
        c_star=c_star,
        theta_star=theta_star,
        A0=A0,
        theta_min=theta_star - 0.5 * math.pi / mu,
        theta_0=A0 - 0.5 * math.pi,
        E_hat=0.5 * u0 * u0 + c0 * c0 / (g.gamma - 1.0),
    )


def _mach_angle(fan: SimpleWaveFan, theta: float) -> float:
    # w = mu (theta* - theta) in [0, pi/2); tan A = mu cot w
    w = fan.gas.mu * (fan.theta_star - theta)
    return math.atan2(fan.gas.mu * math.cos(w), math.sin(w))


def fan_sigma(fan: SimpleWaveFan, theta: float) -> float:
    return theta + 0.5 * math.pi - _mach_angle(fan, theta)


def fan_state(fan: SimpleWaveFan, theta: float) -> FanPoint:
    if not (fan.theta_min < theta <= fan.theta_star):
        raise OutOfRange(f"theta={theta} outside ({fan.theta_min}, {fan.theta_star}]")
    mu = fan.gas.mu
    t = mu * (theta - fan.theta_star)
    ct, st = math.cos(t), math.sin(t)
    cs = fan.c_star
    u = cs * (ct * math.cos(theta) + st * math.sin(theta) / mu)
    v = cs * (ct * math.sin(theta) - st * math.cos(theta) / mu)
    c = cs * ct
    q = cs * math.sqrt(ct * ct + st * st / (mu * mu))
    alpha = theta + 0.5 * math.pi
    A = math.asin(min(c / q, 1.0))
    sigma = alpha - A
    s = fan.upstream.s
    state = FlowState(u, v, density_from(c, s, fan.gas), s)
    return FanPoint(theta, u, v, c, q, alpha, A, sigma, sigma - A, state)


def invert_sigma(fan: SimpleWaveFan, sigma: float, tol: float = 1e-12, max_iter: int = 100) -> float:
    """Fan parameter whose flow angle is ``sigma`` (bracketed Newton)."""
    lo, hi = fan.theta_min, fan.theta_star
    s_lo, s_hi = fan.theta_min + 0.5 * math.pi, fan.theta_star
    if not (s_lo - tol <= sigma <= s_hi + tol):
        raise OutOfRange(f"sigma={sigma} outside [{s_lo}, {s_hi}]")
    if sigma <= s_lo:
        return lo
    if sigma >= s_hi:
        return hi
    mu = fan.gas.mu
    theta = min(max(sigma, lo), hi)
    for _ in range(max_iter):
        r = fan_sigma(fan, theta) - sigma
        if abs(r) <= tol * 1e-3:
            return theta
        if r > 0.0:
            hi = theta
        else:
            lo = theta
        w = mu * (fan.theta_star - theta)
        sw2, cw2 = math.sin(w) ** 2, math.cos(w) ** 2
        slope = (1.0 - mu * mu) * sw2 / (sw2 + mu * mu * cw2)
        nxt = theta - r / slope if slope > 0.0 else 0.5 * (lo + hi)
        if not (lo < nxt < hi):
            nxt = 0.5 * (lo + hi)
        if abs(nxt - theta) <= 1e-16 * max(1.0, abs(theta)):
            return nxt
        theta = nxt
    if abs(fan_sigma(fan, theta) - sigma) > tol:
        raise OutOfRange(f"sigma inversion did not converge for sigma={sigma}")
    return theta


def vacuum_turning(fan: SimpleWaveFan) -> float:
    """Flow angle at which the lower-wall fan reaches vacuum."""
    return fan.theta_min + 0.5 * math.pi


def vacuum_onset(fan: SimpleWaveFan, duct: DuctGeometry) -> float | None:
    """Abscissa where the lower wall turns the fan to vacuum, or None if it never does."""
    turn = -vacuum_turning(fan)
    if turn >= 0.5 * math.pi or math.tan(turn) >= duct.f_prime_inf:
        return None
    target = math.tan(turn)
    hi = max(duct.f0, 1.0)
    while duct.f_prime(hi) < target:
        hi *= 2.0
        if hi > 1e12:
            return None
    return brentq(lambda x: duct.f_prime(x) - target, 0.0, hi, xtol=1e-15, rtol=1e-15)


def wall_theta(fan: SimpleWaveFan, duct: DuctGeometry, xi: float) -> float:
    """Fan parameter on the straight C+ line leaving the lower wall at ``xi``."""
    return invert_sigma(fan, -math.atan(duct.f_prime(xi)))


def oracle_field(fan: SimpleWaveFan, duct: DuctGeometry, x: float, y: float, tol: float = 1e-10) -> FlowState:
    """Exact fan state at (x, y) by locating the straight C+ line through it."""
    x_vac = vacuum_onset(fan, duct)
    xi_hi = x if x_vac is None else min(x, x_vac)

    def miss(xi: float) -> float:
        th = fan.theta_0 if xi == 0.0 else wall_theta(fan, duct, xi)
        # sin(alpha)(x - xi) - cos(alpha)(y + f(xi)) with alpha = th + pi/2
        return math.cos(th) * (x - xi) + math.sin(th) * (y + duct.f(xi))

    h0 = miss(0.0)
    if abs(h0) <= tol:
        return fan.upstream
    if h0 < 0.0 or xi_hi <= 0.0:
        raise OutOfRegion(f"({x}, {y}) lies upstream of the fan")
    h1 = miss(xi_hi)
    if h1 > 0.0:
        if h1 <= tol:
            xi = xi_hi
        else:
            raise OutOfRegion(f"({x}, {y}) lies beyond the last fan line")
    else:
        xi = brentq(miss, 0.0, xi_hi, xtol=1e-15, rtol=1e-15)
    th = wall_theta(fan, duct, xi)
    if th <= fan.theta_min:
        raise OutOfRegion(f"({x}, {y}) lies in the vacuum region")
    return fan_state(fan, th).state


def fan_derived(fan: SimpleWaveFan, theta: float):
    return derive(fan_state(fan, theta).state, fan.gas)
