"""
Inlet profiles and the streamline transport they induce.

Every streamline is identified by its inlet ordinate (the *label*).  The
label is recovered from the stream function, and the quantities that are
invariant along streamlines (entropy, Bernoulli value, the scaled entropy
gradient) are then read off the inlet profile exactly.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, NamedTuple

import numpy as np
from scipy.interpolate import CubicHermiteSpline, PchipInterpolator

from .errors import InvalidParameter, ProfileViolation
from .gas_state import GasConstants, sound_speed

SHAPES = ("cosine", "velocity", "entropy")


def _zero(y: float) -> float:
    return 0.0


@dataclass(frozen=True)
class InletProfile:
    """Inflow (u, v, rho, s)(y) on [-f0, f0] with the derivatives the solver needs."""

    f0: float
    u: Callable[[float], float]
    rho: Callable[[float], float]
    s: Callable[[float], float]
    du: Callable[[float], float]
    ds: Callable[[float], float]
    v: Callable[[float], float] = _zero
    uniform: bool = False
    label: str = "custom"


def uniform_profile(u0: float, rho0: float, s0: float, f0: float = 1.0) -> InletProfile:
    return InletProfile(
        f0=f0,
        u=lambda y: u0,
        rho=lambda y: rho0,
        s=lambda y: s0,
        du=_zero,
        ds=_zero,
        uniform=True,
        label=f"uniform(u0={u0!r}, rho0={rho0!r}, s0={s0!r})",
    )


def perturbed_profile(
    u0: float, rho0: float, s0: float, eps: float, shape: str = "cosine", f0: float = 1.0, gamma: float = 1.4
) -> InletProfile:
    """Even perturbation ``1 + eps*cos(pi y / (2 f0))`` at constant pressure.

    ``cosine`` perturbs velocity and entropy, ``velocity`` only the velocity,
    ``entropy`` only the entropy; density follows from constant pressure.
    """
    if shape not in SHAPES:
        raise InvalidParameter(f"unknown perturbation shape '{shape}' (expected one of {SHAPES})")
    k = 0.5 * math.pi / f0
    du_on = shape in ("cosine", "velocity")
    ds_on = shape in ("cosine", "entropy")

    def phi(y: float) -> float:
        return math.cos(k * y)

    def dphi(y: float) -> float:
        return -k * math.sin(k * y)

    def u(y: float) -> float:
        return u0 * (1.0 + eps * phi(y)) if du_on else u0

    def du(y: float) -> float:
        return u0 * eps * dphi(y) if du_on else 0.0

    def s(y: float) -> float:
        return s0 * (1.0 + eps * phi(y)) if ds_on else s0

    def ds(y: float) -> float:
        return s0 * eps * dphi(y) if ds_on else 0.0

    def rho(y: float) -> float:
        return rho0 * (s0 / s(y)) ** (1.0 / gamma)

    return InletProfile(
        f0=f0, u=u, rho=rho, s=s, du=du, ds=ds, uniform=eps == 0.0,
        label=f"perturbed(shape={shape}, eps={eps!r})",
    )


def load_inlet_table(path: str | Path) -> InletProfile:
    """Read a CSV with header ``y,u,rho,s`` (optionally ``v``) covering [-f0, f0]."""
    path = Path(path)
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        cols = [h.strip() for h in reader.fieldnames or []]
        if not {"y", "u", "rho", "s"} <= set(cols):
            raise InvalidParameter(f"{path}: expected columns y,u,rho,s")
        try:
            rows = [{k.strip(): float(v) for k, v in r.items()} for r in reader]
        except (TypeError, ValueError) as exc:
            raise InvalidParameter(f"{path}: non-numeric entry ({exc})") from exc
    y = np.array([r["y"] for r in rows])
    if y.size < 3 or np.any(np.diff(y) <= 0.0):
        raise InvalidParameter(f"{path}: y must be strictly increasing with at least three rows")
    if abs(y[0] + y[-1]) > 1e-12 * max(1.0, abs(y[-1])):
        raise InvalidParameter(f"{path}: table must span a symmetric interval [-f0, f0]")
    fits = {k: PchipInterpolator(y, [r[k] for r in rows]) for k in ("u", "rho", "s")}
    v_fit = PchipInterpolator(y, [r.get("v", 0.0) for r in rows])
    du, ds = fits["u"].derivative(), fits["s"].derivative()
    return InletProfile(
        f0=float(y[-1]),
        u=lambda t: float(fits["u"](t)),
        rho=lambda t: float(fits["rho"](t)),
        s=lambda t: float(fits["s"](t)),
        du=lambda t: float(du(t)),
        ds=lambda t: float(ds(t)),
        v=lambda t: float(v_fit(t)),
        label=f"table({path.name})",
    )


def check_profile(profile: InletProfile, g: GasConstants, n_samples: int = 401) -> None:
    """Raise ProfileViolation naming the first failed inlet assumption."""
    f0 = profile.f0
    if not f0 > 0.0:
        raise ProfileViolation("A1", f"half-width must be positive (got {f0})")
    ys = np.linspace(-f0, f0, n_samples)
    h = ys[1] - ys[0]
    vals = []
    for y in ys:
        row = (profile.u(y), profile.v(y), profile.rho(y), profile.s(y), profile.du(y), profile.ds(y))
        if not all(math.isfinite(r) for r in row):
            raise ProfileViolation("A1", f"non-finite inflow value at y={y!r}")
        vals.append(row)
    vals = np.array(vals)
    # derivative columns must agree with the sampled values (continuous differentiability)
    for col, dcol, name in ((0, 4, "u"), (3, 5, "s")):
        fd = np.gradient(vals[:, col], h, edge_order=2)
        scale = max(1.0, float(np.max(np.abs(vals[:, dcol]))))
        if np.max(np.abs(fd - vals[:, dcol])) > 1e-2 * scale:
            raise ProfileViolation("A1", f"derivative of {name} inconsistent with its samples")
    u, v, rho, s = vals[:, 0], vals[:, 1], vals[:, 2], vals[:, 3]
    if np.any(rho <= 0.0) or np.any(s <= 0.0):
        raise ProfileViolation("A2", "density and entropy must be positive")
    if np.max(np.abs(v)) > 0.0:
        raise ProfileViolation("A2", "inflow must be horizontal (v_in = 0)")
    p = s * rho**g.gamma
    if np.max(np.abs(p - p[0])) > 1e-10 * abs(p[0]):
        raise ProfileViolation("A2", "inflow pressure s*rho**gamma must be constant")
    c = np.sqrt(g.gamma * s * rho ** (g.gamma - 1.0))
    if np.any(u <= c):
        raise ProfileViolation("A2", "inflow must be supersonic (u_in > c_in)")
    mirrored = vals[::-1, :4].copy()
    mirrored[:, 1] *= -1.0
    if np.max(np.abs(vals[:, :4] - mirrored)) > 1e-10 * max(1.0, float(np.max(np.abs(vals[:, :4])))):
        raise ProfileViolation("A3", "inflow must be even in y")


class Transport(NamedTuple):
    """Streamline invariants for one label, plus what the vorticity law needs."""

    label: float
    s: float
    E_hat: float
    omega_in: float  # vorticity over density at the inlet
    c2_in: float
    delta2: float
    coupling: float  # (s gamma)^(1/(gamma-1)) / (gamma (gamma-1) s)

    def omega_over_rho(self, c: float) -> float:
        return self.omega_in - self.delta2 * self.coupling * (c * c - self.c2_in)


_GL_X, _GL_W = np.polynomial.legendre.leggauss(8)


class InflowModel:
    """Inlet-derived maps used throughout the solver.

    ``psi(y)`` is the inlet stream function and ``G(y)`` the integral of
    cot A along the inlet, both measured from the axis; their tabulated
    inverses are accurate to roundoff for smooth profiles.
    """

    def __init__(self, profile: InletProfile, g: GasConstants, n_table: int = 2048):
        self.profile = profile
        self.gas = g
        f0 = profile.f0
        self.f0 = f0
        self.uniform = profile.uniform
        u0, rho0, s0 = profile.u(0.0), profile.rho(0.0), profile.s(0.0)
        self.c0 = sound_speed(rho0, s0, g)
        self.u0 = u0
        self.rho0 = rho0
        self.s0 = s0
        if self.uniform:
            self.flux_density = rho0 * u0
            self.cot0 = math.sqrt(u0 * u0 - self.c0 * self.c0) / self.c0
            self._uniform_tr = self._transport_at(0.0)
            self.psi_total = self.flux_density * 2.0 * f0
            return
        half = np.linspace(0.0, f0, n_table // 2 + 1)
        ys = np.concatenate([-half[:0:-1], half])
        m = np.array([self._mass(y) for y in ys])
        cot = np.array([self._cot(y) for y in ys])
        psi = self._centred_integral(self._mass, half)
        G = self._centred_integral(self._cot, half)
        self.psi_total = float(psi[-1] - psi[0])
        self._psi_of_y = CubicHermiteSpline(ys, psi, m)
        self._y_of_psi = CubicHermiteSpline(psi, ys, 1.0 / m)
        self._G_of_y = CubicHermiteSpline(ys, G, cot)
        self._y_of_G = CubicHermiteSpline(G, ys, 1.0 / cot)

    def _centred_integral(self, fn, half: np.ndarray) -> np.ndarray:
        """Integral of ``fn`` from the axis, on the mirrored grid built from ``half``."""
        up = np.cumsum([self._gauss(fn, a, b) for a, b in zip(half, half[1:])])
        down = np.cumsum([self._gauss(fn, -b, -a) for a, b in zip(half, half[1:])])
        return np.concatenate([-down[::-1], [0.0], up])

    @staticmethod
    def _gauss(fn, a: float, b: float) -> float:
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        return half * sum(w * fn(mid + half * x) for x, w in zip(_GL_X, _GL_W))

    def _mass(self, y: float) -> float:
        return self.profile.rho(y) * self.profile.u(y)

    def _cot(self, y: float) -> float:
        p = self.profile
        c = sound_speed(p.rho(y), p.s(y), self.gas)
        u = p.u(y)
        return math.sqrt(u * u - c * c) / c

    def psi(self, y: float) -> float:
        if self.uniform:
            return self.flux_density * y
        return float(self._psi_of_y(y))

    def label_from_psi(self, psi: float) -> float:
        if self.uniform:
            return psi / self.flux_density
        half = 0.5 * self.psi_total
        psi = min(max(psi, -half), half)
        return float(self._y_of_psi(psi))

    def G(self, y: float) -> float:
        if self.uniform:
            return self.cot0 * y
        return float(self._G_of_y(y))

    def y_from_G(self, G: float) -> float:
        if self.uniform:
            return G / self.cot0
        return float(self._y_of_G(G))

    def _transport_at(self, y: float) -> Transport:
        g = self.gas
        p = self.profile
        u, rho, s = p.u(y), p.rho(y), p.s(y)
        c = sound_speed(rho, s, g)
        gm1 = g.gamma - 1.0
        # entropy derivative along C+ at the inlet: sin(A_in) s'(y)
        d2 = p.ds(y) * (c / u) / c ** ((g.gamma + 1.0) / gm1)
        coupling = (s * g.gamma) ** (1.0 / gm1) / (g.gamma * gm1 * s)
        return Transport(y, s, 0.5 * u * u + c * c / gm1, p.du(y) / rho, c * c, d2, coupling)

    def transport(self, psi: float) -> Transport:
        if self.uniform:
            return self._uniform_tr._replace(label=self.label_from_psi(psi))
        return self._transport_at(self.label_from_psi(psi))

    def transport_at_label(self, y: float) -> Transport:
        if self.uniform:
            return self._uniform_tr._replace(label=y)
        return self._transport_at(y)
