"""
Thermodynamic and characteristic-geometry algebra for a single supersonic
state of a polytropic gas ``p = s * rho**gamma``.

Angles are the canonical representation of characteristic directions;
slopes are derived from them and flagged unusable near the vertical.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import NonPhysical, NonSupersonic

# slopes are not reported beyond this distance from the vertical
SLOPE_ANGLE_LIMIT = math.pi / 2 - 1e-6


@dataclass(frozen=True)
class GasConstants:
    gamma: float = 1.4
    kappa: float = field(init=False)
    mu: float = field(init=False)

    def __post_init__(self):
        if not (self.gamma > 1.0) or not math.isfinite(self.gamma):
            raise NonPhysical(f"adiabatic exponent must satisfy gamma > 1 (got {self.gamma})")
        object.__setattr__(self, "kappa", 2.0 / (self.gamma - 1.0))
        object.__setattr__(self, "mu", math.sqrt((self.gamma - 1.0) / (self.gamma + 1.0)))

    @property
    def nu_max(self) -> float:
        """Largest Prandtl-Meyer angle, reached at vacuum."""
        return 0.5 * math.pi * (1.0 / self.mu - 1.0)


@dataclass(frozen=True)
class FlowState:
    u: float
    v: float
    rho: float
    s: float

    @property
    def is_vacuum(self) -> bool:
        return self.rho == 0.0

    @classmethod
    def vacuum(cls, q: float, sigma: float, s: float) -> "FlowState":
        """Vacuum sentinel moving with the limiting speed ``q`` along ``sigma``."""
        return cls(q * math.cos(sigma), q * math.sin(sigma), 0.0, s)


@dataclass(frozen=True)
class DerivedState:
    c: float
    q: float
    p: float
    A: float
    sigma: float
    alpha: float
    beta: float
    lambda_plus: float
    lambda_minus: float
    lambda_0: float
    E_hat: float
    j: float
    Omega: float

    @property
    def mach(self) -> float:
        return self.q / self.c


class VacuumDerivedState:
    """Derived view of the vacuum sentinel: only ``c``, ``q`` and ``E_hat`` exist."""

    __slots__ = ("c", "q", "E_hat")

    def __init__(self, q: float):
        self.c = 0.0
        self.q = q
        self.E_hat = 0.5 * q * q

    def __getattr__(self, name):
        raise NonPhysical(f"'{name}' is undefined for the vacuum state")


def sound_speed(rho: float, s: float, g: GasConstants) -> float:
    return math.sqrt(g.gamma * s * rho ** (g.gamma - 1.0))


def density_from(c: float, s: float, g: GasConstants) -> float:
    """Invert ``c**2 = gamma s rho**(gamma-1)`` for the density."""
    if not s > 0.0:
        raise NonPhysical(f"entropy must be positive (got {s})")
    if c < 0.0:
        raise NonPhysical(f"sound speed must be non-negative (got {c})")
    if c == 0.0:
        return 0.0
    return (c * c / (g.gamma * s)) ** (1.0 / (g.gamma - 1.0))


def _slope(angle: float) -> float:
    return math.tan(angle) if abs(angle) <= SLOPE_ANGLE_LIMIT else math.nan


def derive(state: FlowState, g: GasConstants) -> DerivedState | VacuumDerivedState:
    u, v, rho, s = state.u, state.v, state.rho, state.s
    q = math.hypot(u, v)
    if rho == 0.0:
        return VacuumDerivedState(q)
    if not rho > 0.0 or not s > 0.0:
        raise NonPhysical(f"density and entropy must be positive (rho={rho}, s={s})")
    c = sound_speed(rho, s, g)
    if not q > c:
        raise NonSupersonic(f"state is not supersonic (q={q}, c={c})")
    A = math.asin(c / q)
    sigma = math.atan2(v, u)
    alpha = sigma + A
    beta = sigma - A
    # eigenvalues straight from the characteristic polynomial where it is regular
    denom = u * u - c * c
    root = c * math.sqrt(q * q - c * c)
    if abs(alpha) <= SLOPE_ANGLE_LIMIT and abs(denom) > 0.0:
        lam_p = (u * v + root) / denom
    else:
        lam_p = _slope(alpha)
    if abs(beta) <= SLOPE_ANGLE_LIMIT and abs(denom) > 0.0:
        lam_m = (u * v - root) / denom
    else:
        lam_m = _slope(beta)
    lam_0 = v / u if abs(sigma) <= SLOPE_ANGLE_LIMIT else math.nan
    return DerivedState(
        c=c,
        q=q,
        p=s * rho**g.gamma,
        A=A,
        sigma=sigma,
        alpha=alpha,
        beta=beta,
        lambda_plus=lam_p,
        lambda_minus=lam_m,
        lambda_0=lam_0,
        E_hat=0.5 * q * q + c * c / (g.gamma - 1.0),
        j=c / (g.gamma * (g.gamma - 1.0) * s),
        Omega=(g.kappa - 1.0) / (g.kappa + 1.0) - math.tan(A) ** 2,
    )


def state_from(sigma: float, c: float, E_hat: float, s: float, g: GasConstants) -> FlowState:
    """Rebuild (u, v, rho, s) from flow angle, sound speed and Bernoulli value."""
    q2 = 2.0 * (E_hat - c * c / (g.gamma - 1.0))
    if not q2 > 0.0:
        raise NonPhysical(f"Bernoulli value {E_hat} leaves no kinetic energy at c={c}")
    q = math.sqrt(q2)
    if not q > c:
        raise NonSupersonic(f"state is not supersonic (q={q}, c={c})")
    return FlowState(q * math.cos(sigma), q * math.sin(sigma), density_from(c, s, g), s)


# Prandtl-Meyer function written in the Mach angle, regular down to vacuum (A = 0).

def prandtl_meyer(A: float, g: GasConstants) -> float:
    return math.atan2(g.mu * math.cos(A), math.sin(A)) / g.mu - 0.5 * math.pi + A


def prandtl_meyer_slope(A: float, g: GasConstants) -> float:
    """d(nu)/dA; negative on (0, pi/2) and zero only at the sonic point."""
    ca2 = math.cos(A) ** 2
    return -(1.0 - g.mu**2) * ca2 / (math.sin(A) ** 2 + g.mu**2 * ca2)


def mach_angle_from_pm(nu: float, g: GasConstants, hint: float | None = None) -> float:
    """Inverse of :func:`prandtl_meyer`; returns A in [0, pi/2].

    Safeguarded Newton on the bracket [0, pi/2]; ``hint`` seeds the iteration.
    """
    nmax = g.nu_max
    if nu >= nmax:
        return 0.0
    if nu <= 0.0:
        return 0.5 * math.pi
    lo, hi = 0.0, 0.5 * math.pi
    if hint is not None and 0.0 < hint < hi:
        A = hint
    else:
        # linearisation about the vacuum end
        A = min((nmax - nu) / (1.0 / g.mu**2 - 1.0), 1.2)
    for _ in range(60):
        r = prandtl_meyer(A, g) - nu
        if r > 0.0:
            lo = A
        else:
            hi = A
        d = prandtl_meyer_slope(A, g)
        step = r / d if d != 0.0 else 0.0
        A_new = A - step
        if not (lo < A_new < hi) or d == 0.0:
            A_new = 0.5 * (lo + hi)
        if abs(A_new - A) <= 1e-16 + 2e-16 * A:
            return A_new
        A = A_new
    return A


def speed_from(A: float, E_hat: float, g: GasConstants) -> tuple[float, float]:
    """Speed and sound speed for Mach angle ``A`` on the Bernoulli level ``E_hat``."""
    sa = math.sin(A)
    q = math.sqrt(2.0 * E_hat / (1.0 + g.kappa * sa * sa))
    return q, q * sa
