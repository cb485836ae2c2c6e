"""
Unit processes of the rotational method of characteristics.

The compatibility relations are integrated in polar form.  With the
Prandtl-Meyer angle ``nu`` as integrating factor they read

    along C+:  d(sigma - nu) = -(omega cos A / q) dl + (cot A / 2E) dE
    along C-:  d(sigma + nu) = -(omega cos A / q) dl - (cot A / 2E) dE

which is algebraically the same pair as the (u, v) form but integrates
simple waves exactly.  Entropy, Bernoulli value and the scaled entropy
gradient are carried by streamline labels (see :mod:`ductmoc.inflow`), and
vorticity over density follows from the exact streamline integral of its
transport law.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from .duct_geometry import LOWER, UPPER, DuctGeometry
from .errors import (
    CorrectorDiverged,
    FootOutsideFront,
    InvalidParameter,
    NoIntersection,
    NoWallHit,
    VacuumReached,
)
from .gas_state import FlowState, GasConstants, mach_angle_from_pm, prandtl_meyer, speed_from
from .inflow import InflowModel, InletProfile, Transport, check_profile

INTERIOR = "interior"
WALL_LOWER = "wall_lower"
WALL_UPPER = "wall_upper"
INLET = "inlet"
VACUUM = "vacuum"
AXIS = "axis"
NODE_KINDS = (INTERIOR, WALL_LOWER, WALL_UPPER, INLET, VACUUM, AXIS)


@dataclass
class SolverConfig:
    x_max: float = 30.0
    c_vac: float | None = None  # absolute cutoff; None means 1e-4 * c0
    corrector_tol: float = 1e-12
    max_iters: int = 20
    max_refinements: int = 40
    max_regions: int = 64
    dx_guard: float | None = None  # None means 10 * f(0)
    min_angle: float = 1e-4
    max_wall_turn: float | None = None  # None means 2 / (N - 1) rad

    def __post_init__(self):
        if not self.x_max > 0.0:
            raise InvalidParameter(f"x_max must be positive (got {self.x_max})")
        if self.c_vac is not None and not self.c_vac > 0.0:
            raise InvalidParameter(f"c_vac must be positive (got {self.c_vac})")
        if not self.corrector_tol > 0.0 or self.max_iters < 1:
            raise InvalidParameter("corrector_tol must be positive and max_iters at least 1")
        if self.max_regions < 1 or self.max_refinements < 0:
            raise InvalidParameter("max_regions must be positive and max_refinements non-negative")


class CharNode:
    """One lattice point: position, polar state, streamline invariants, lattice ids."""

    __slots__ = (
        "x", "y", "sigma", "nu", "A", "q", "c", "rho", "psi", "tr", "omega_over_rho",
        "kind", "region", "i", "j", "plus_id", "minus_id",
    )

    def __init__(self, x, y, sigma, nu, A, q, c, rho, psi, tr: Transport, kind=INTERIOR):
        self.x = x
        self.y = y
        self.sigma = sigma
        self.nu = nu
        self.A = A
        self.q = q
        self.c = c
        self.rho = rho
        self.psi = psi
        self.tr = tr
        self.omega_over_rho = tr.omega_over_rho(c)
        self.kind = kind
        self.region = None
        self.i = 0
        self.j = 0
        self.plus_id = -1
        self.minus_id = -1

    @property
    def alpha(self) -> float:
        return self.sigma + self.A

    @property
    def beta(self) -> float:
        return self.sigma - self.A

    @property
    def u(self) -> float:
        return self.q * math.cos(self.sigma)

    @property
    def v(self) -> float:
        return self.q * math.sin(self.sigma)

    @property
    def s(self) -> float:
        return self.tr.s

    @property
    def E_hat(self) -> float:
        return self.tr.E_hat

    @property
    def delta2(self) -> float:
        return self.tr.delta2

    @property
    def label(self) -> float:
        return self.tr.label

    @property
    def omega(self) -> float:
        return self.rho * self.omega_over_rho

    @property
    def state(self) -> FlowState:
        return FlowState(self.u, self.v, self.rho, self.tr.s)

    def __repr__(self) -> str:
        return f"CharNode({self.kind}, x={self.x:.6g}, y={self.y:.6g}, c={self.c:.6g}, sigma={self.sigma:.6g})"


class FlowModel:
    """Everything a unit process needs besides its input nodes."""

    def __init__(self, inflow: InflowModel, duct: DuctGeometry, cfg: SolverConfig):
        self.inflow = inflow
        self.gas: GasConstants = inflow.gas
        self.duct = duct
        self.cfg = cfg
        self.c_vac = cfg.c_vac if cfg.c_vac is not None else 1e-4 * inflow.c0
        self.nu_max = self.gas.nu_max
        self.sin_guard = math.sin(cfg.min_angle)
        # largest flow turning allowed between neighbouring wall nodes
        self.wall_turn_limit = cfg.max_wall_turn if cfg.max_wall_turn is not None else 0.05
        f0 = inflow.f0
        self.wall_tr = {LOWER: inflow.transport_at_label(-f0), UPPER: inflow.transport_at_label(f0)}
        self.wall_psi = {LOWER: -0.5 * inflow.psi_total, UPPER: 0.5 * inflow.psi_total}

    def make_node(self, x, y, sigma, nu, psi, tr: Transport, kind=INTERIOR, A_hint=None) -> CharNode:
        if nu >= self.nu_max:
            raise VacuumReached(f"Prandtl-Meyer angle at vacuum limit near x={x:.6g}")
        A = mach_angle_from_pm(nu, self.gas, A_hint)
        q, c = speed_from(A, tr.E_hat, self.gas)
        if c < self.c_vac:
            raise VacuumReached(f"sound speed {c:.3e} below cutoff near x={x:.6g}")
        rho = (c * c / (self.gas.gamma * tr.s)) ** (1.0 / (self.gas.gamma - 1.0))
        return CharNode(x, y, sigma, nu, A, q, c, rho, psi, tr, kind)

    def laminar_node(self, x: float, y: float, kind=INTERIOR) -> CharNode:
        """Node carrying the undisturbed inflow state of ordinate ``y``."""
        tr = self.inflow.transport_at_label(y)
        g = self.gas
        c = math.sqrt(tr.c2_in)
        u = math.sqrt(2.0 * tr.E_hat - 2.0 * tr.c2_in / (g.gamma - 1.0))
        A = math.asin(c / u)
        rho = (c * c / (g.gamma * tr.s)) ** (1.0 / (g.gamma - 1.0))
        return CharNode(x, y, 0.0, prandtl_meyer(A, g), A, u, c, rho, self.inflow.psi(y), tr, kind)


def _mass_increment(n: CharNode, dx: float, dy: float) -> float:
    # rho (u dy - v dx)
    return n.rho * n.q * (math.cos(n.sigma) * dy - math.sin(n.sigma) * dx)


def _source(n: CharNode) -> tuple[float, float]:
    """Coefficients (omega cos A / q, cot A / 2E) of the polar compatibility pair."""
    return (n.rho * n.omega_over_rho * math.cos(n.A) / n.q, 1.0 / (math.tan(n.A) * 2.0 * n.tr.E_hat))


def interior_point(L: CharNode, R: CharNode, model: FlowModel) -> CharNode:
    """New node where the C+ through ``L`` meets the C- through ``R``."""
    cfg = model.cfg
    aL, bR = L.sigma + L.A, R.sigma - R.A
    kL, hL = _source(L)
    kR, hR = _source(R)
    Sp, Sm = L.sigma - L.nu, R.sigma + R.nu
    a, b = aL, bR
    P = None
    dxLR, dyLR = R.x - L.x, R.y - L.y
    for _ in range(cfg.max_iters):
        ca, sa, cb, sb = math.cos(a), math.sin(a), math.cos(b), math.sin(b)
        det = sa * cb - ca * sb
        if abs(det) < model.sin_guard:
            raise VacuumReached("characteristics cross at a vanishing angle")
        t1 = (cb * dyLR - sb * dxLR) / det
        t2 = (ca * dyLR - sa * dxLR) / det
        if not (t1 > 0.0 and t2 > 0.0):
            raise NoIntersection("characteristic segments do not meet downstream")
        x, y = L.x + t1 * ca, L.y + t1 * sa
        # stream function from both parents (trapezoid along each chord)
        mL = _mass_increment(L, x - L.x, y - L.y)
        mR = _mass_increment(R, x - R.x, y - R.y)
        if P is None:
            psi = 0.5 * ((L.psi + mL) + (R.psi + mR))
            kP, hP = 0.5 * (kL + kR), 0.5 * (hL + hR)
        else:
            psi = 0.5 * ((L.psi + 0.5 * (mL + _mass_increment(P, x - L.x, y - L.y)))
                         + (R.psi + 0.5 * (mR + _mass_increment(P, x - R.x, y - R.y))))
            kP, hP = _source(P)
        tr = model.inflow.transport(psi)
        E = tr.E_hat
        plus = Sp - 0.5 * (kL + kP) * t1 + 0.5 * (hL + hP) * (E - L.tr.E_hat)
        minus = Sm - 0.5 * (kR + kP) * t2 - 0.5 * (hR + hP) * (E - R.tr.E_hat)
        hint = P.A if P is not None else 0.5 * (L.A + R.A)
        new = model.make_node(x, y, 0.5 * (plus + minus), 0.5 * (minus - plus), psi, tr, INTERIOR, hint)
        a, b = 0.5 * (aL + new.sigma + new.A), 0.5 * (bR + new.sigma - new.A)
        if P is not None:
            change = abs(new.x - P.x) + abs(new.y - P.y) + abs(new.sigma - P.sigma) + abs(new.nu - P.nu)
            if change <= cfg.corrector_tol:
                return new
        P = new
    raise CorrectorDiverged(f"no convergence after {cfg.max_iters} corrector passes near x={P.x:.6g}")


def _ray_hits_wall(x0: float, y0: float, ang: float, duct: DuctGeometry, side: str) -> tuple[float, float]:
    """Distance along the ray from (x0, y0) at angle ``ang`` to the wall, and the hit abscissa.

    The gap between ray and wall is convex in the ray parameter, so Newton
    started from the near side converges monotonically or proves a miss.
    """
    ca, sa = math.cos(ang), math.sin(ang)
    sgn = 1.0 if side == LOWER else -1.0

    def gap(t: float) -> tuple[float, float]:
        x = x0 + t * ca
        return sgn * (y0 + t * sa) + duct.f(x), sgn * sa + duct.f_prime(x) * ca

    t = 0.0
    g0, d0 = gap(0.0)
    if g0 <= 0.0:
        return 0.0, x0
    for _ in range(200):
        g, d = gap(t)
        if g <= 1e-15 * max(1.0, abs(y0)):
            return t, x0 + t * ca
        if d >= 0.0:
            raise NoWallHit(f"characteristic from ({x0:.6g}, {y0:.6g}) does not reach the {side} wall")
        step = -g / d
        t += step
        if step <= 1e-16 * max(t, 1.0):
            return t, x0 + t * ca
        if x0 + t * ca > duct.x_max * 1e3 + 1e6:
            break
    raise NoWallHit(f"characteristic from ({x0:.6g}, {y0:.6g}) does not reach the {side} wall")


def wall_point(N: CharNode, side: str, model: FlowModel) -> CharNode:
    """Wall node reached by the C- (lower wall) or C+ (upper wall) through ``N``."""
    cfg = model.cfg
    duct = model.duct
    lower = side == LOWER
    tr = model.wall_tr[side]
    psi = model.wall_psi[side]
    kN, hN = _source(N)
    E = tr.E_hat
    ang0 = N.beta if lower else N.alpha
    ang = ang0
    W = None
    for _ in range(cfg.max_iters):
        t, xw = _ray_hits_wall(N.x, N.y, ang, duct, side)
        if not t > 0.0:
            raise NoWallHit("node already lies on the wall")
        fp = duct.f_prime(xw)
        sig = -math.atan(fp) if lower else math.atan(fp)
        kW, hW = (kN, hN) if W is None else _source(W)
        if lower:
            nu = N.sigma + N.nu - 0.5 * (kN + kW) * t - 0.5 * (hN + hW) * (E - N.tr.E_hat) - sig
        else:
            nu = sig - (N.sigma - N.nu - 0.5 * (kN + kW) * t + 0.5 * (hN + hW) * (E - N.tr.E_hat))
        yw = -duct.f(xw) if lower else duct.f(xw)
        try:
            new = model.make_node(xw, yw, sig, nu, psi, tr, WALL_LOWER if lower else WALL_UPPER,
                                  W.A if W is not None else N.A)
        except VacuumReached as exc:
            exc.x_wall = xw
            raise
        ang = 0.5 * (ang0 + (new.beta if lower else new.alpha))
        if W is not None:
            change = abs(new.x - W.x) + abs(new.sigma - W.sigma) + abs(new.nu - W.nu)
            if change <= cfg.corrector_tol:
                return new
        W = new
    raise CorrectorDiverged(f"wall corrector did not converge near x={W.x:.6g}")


@dataclass(frozen=True)
class VacuumInterface:
    side: str
    x: float  # onset abscissa on the wall
    y: float
    slope: float  # dy/dx of the straight interface, tangent to the wall

    def y_at(self, x: float) -> float:
        return self.y + self.slope * (x - self.x)

    def distance(self, x: float, y: float) -> float:
        return abs(y - self.y_at(x)) / math.hypot(1.0, self.slope)


def detect_vacuum(node: CharNode, model: FlowModel) -> tuple[bool, VacuumInterface | None]:
    """Flag a wall node whose sound speed has dropped below the cutoff."""
    if node.c >= model.c_vac:
        return False, None
    return True, vacuum_interface(model.duct, node.x, LOWER if node.kind == WALL_LOWER else UPPER)


def vacuum_interface(duct: DuctGeometry, x: float, side: str) -> VacuumInterface:
    fp = duct.f_prime(x)
    if side == LOWER:
        return VacuumInterface(LOWER, x, -duct.f(x), -fp)
    return VacuumInterface(UPPER, x, duct.f(x), fp)


class Front:
    """Ordered node polyline with monotone cubic interpolation in chord length."""

    FIELDS = ("x", "y", "sigma", "nu", "psi")

    def __init__(self, nodes: list[CharNode]):
        if len(nodes) < 2:
            raise InvalidParameter("a front needs at least two nodes")
        self.nodes = list(nodes)
        xs = np.array([n.x for n in nodes])
        ys = np.array([n.y for n in nodes])
        seg = np.hypot(np.diff(xs), np.diff(ys))
        if np.any(seg <= 0.0):
            raise InvalidParameter("front nodes must be distinct")
        self.param = np.concatenate([[0.0], np.cumsum(seg)])
        table = {
            "x": xs,
            "y": ys,
            "sigma": [n.sigma for n in nodes],
            "nu": [n.nu for n in nodes],
            "psi": [n.psi for n in nodes],
            "s": [n.tr.s for n in nodes],
            "E_hat": [n.tr.E_hat for n in nodes],
            "omega_over_rho": [n.omega_over_rho for n in nodes],
            "delta2": [n.tr.delta2 for n in nodes],
        }
        self._fit = {k: PchipInterpolator(self.param, np.asarray(v, dtype=float)) for k, v in table.items()}

    @property
    def length(self) -> float:
        return float(self.param[-1])

    def at(self, t: float, name: str) -> float:
        return float(self._fit[name](t))

    def locate(self, x: float, y: float, ang: float) -> float:
        """Chord parameter where the line through (x, y) at angle ``ang`` meets the polyline."""
        ca, sa = math.cos(ang), math.sin(ang)
        for k in range(len(self.nodes) - 1):
            a, b = self.nodes[k], self.nodes[k + 1]
            ex, ey = b.x - a.x, b.y - a.y
            det = ca * ey - sa * ex
            if det == 0.0:
                continue
            # point on segment: a + w (b - a) lies on the line through (x, y)
            w = (sa * (a.x - x) - ca * (a.y - y)) / det
            if -1e-12 <= w <= 1.0 + 1e-12:
                return float(self.param[k] + min(max(w, 0.0), 1.0) * (self.param[k + 1] - self.param[k]))
        raise FootOutsideFront(f"streamline through ({x:.6g}, {y:.6g}) misses the front")


def streamline_sample(pos: tuple[float, float], sigma: float, front: Front) -> dict[str, float]:
    """Transported quantities at the foot of the streamline through ``pos``."""
    t = front.locate(pos[0], pos[1], sigma)
    return {k: front.at(t, k) for k in ("s", "E_hat", "omega_over_rho", "delta2")}


def inlet_discretize(profile: InletProfile, duct: DuctGeometry, N: int, model: FlowModel | None = None,
                     cfg: SolverConfig | None = None) -> list[CharNode]:
    """Equally spaced inlet nodes from the lower to the upper wall."""
    if N < 3:
        raise InvalidParameter(f"need at least 3 inlet nodes (got {N})")
    if model is None:
        g = GasConstants()
        check_profile(profile, g)
        model = FlowModel(InflowModel(profile, g), duct, cfg or SolverConfig())
    else:
        check_profile(profile, model.gas)
    f0 = duct.f0
    if abs(f0 - profile.f0) > 1e-12 * f0:
        raise InvalidParameter(f"inlet half-width {profile.f0} does not match the wall f(0)={f0}")
    nodes = []
    for k in range(N):
        if 2 * k < N - 1:
            y = -f0 + 2.0 * f0 * k / (N - 1)
        elif 2 * k == N - 1:
            y = 0.0
        else:
            y = -nodes[N - 1 - k].y  # exact mirror of the lower half
        kind = WALL_LOWER if k == 0 else WALL_UPPER if k == N - 1 else INLET
        n = model.laminar_node(0.0, y, kind)
        n.plus_id = n.minus_id = k
        nodes.append(n)
    return nodes
