"""
Verification of a computed solution against exact relations.

All checks are pure functions of a :class:`~ductmoc.region_builder.Solution`.
Derivatives along characteristics are two-point differences between
consecutive nodes of a mesh line, with coefficients taken at the segment
midpoint, so no interpolation enters the residuals.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.spatial import cKDTree

from .duct_geometry import LOWER, UPPER, DuctGeometry
from .errors import InvalidParameter, OutOfRegion, StationOutsideGas
from .gas_state import FlowState, GasConstants, sound_speed
from .inflow import InletProfile
from .moc_kernel import CharNode, SolverConfig, WALL_LOWER, WALL_UPPER
from .region_builder import Solution, orchestrate
from .simple_wave import build_fan, fan_state, invert_sigma, oracle_field

# residuals below this are indistinguishable from rounding
ROUNDOFF = 1e-12


@dataclass
class Check:
    """One residual check: worst and mean absolute residual over its samples."""

    name: str
    relation: str
    max_residual: float
    mean_residual: float
    location: tuple[float, float] | None
    tolerance: float | None
    samples: int

    @property
    def passed(self) -> bool | None:
        if self.tolerance is None:
            return None
        return self.max_residual <= self.tolerance

    def line(self) -> str:
        verdict = {True: "pass", False: "FAIL", None: "info"}[self.passed]
        tol = "-" if self.tolerance is None else f"{self.tolerance:.3e}"
        loc = "-" if self.location is None else f"({self.location[0]:.6g}, {self.location[1]:.6g})"
        return (f"{self.name:<28} max={self.max_residual:.6e} mean={self.mean_residual:.6e} "
                f"tol={tol} at={loc} n={self.samples} [{verdict}]  {self.relation}")


@dataclass
class Convergence:
    """Errors over a resolution ladder and the least-squares order fit."""

    name: str
    resolutions: list[int]
    spacings: list[float]
    errors: list[float]
    order: float
    reliable: bool
    note: str = ""

    def line(self) -> str:
        errs = ", ".join(f"{e:.3e}" for e in self.errors)
        flag = "" if self.reliable else " (unreliable: errors at roundoff)"
        return f"{self.name:<28} N={self.resolutions} errors=[{errs}] order={self.order:.3f}{flag}"


@dataclass
class DiagnosticsReport:
    title: str
    checks: list[Check] = field(default_factory=list)
    convergence: list[Convergence] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def check(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def order(self, name: str) -> Convergence:
        for c in self.convergence:
            if c.name == name:
                return c
        raise KeyError(name)

    @property
    def passed(self) -> bool:
        return all(c.passed is not False for c in self.checks)

    def extend(self, other: "DiagnosticsReport") -> "DiagnosticsReport":
        self.checks += other.checks
        self.convergence += other.convergence
        self.notes += [f"{other.title}: {n}" for n in other.notes]
        return self

    def to_text(self) -> str:
        out = [f"# {self.title}"]
        out += [c.line() for c in self.checks]
        out += [c.line() for c in self.convergence]
        out += [f"note: {n}" for n in self.notes]
        return "\n".join(out) + "\n"


def _check(name: str, relation: str, residuals, points, tolerance: float | None) -> Check:
    r = np.abs(np.asarray(residuals, dtype=float))
    if r.size == 0:
        return Check(name, relation, 0.0, 0.0, None, tolerance, 0)
    k = int(np.argmax(r))
    return Check(name, relation, float(r[k]), float(r.mean()), tuple(map(float, points[k])), tolerance, int(r.size))


def fitted_order(spacings, errors) -> float:
    """Least-squares slope of log(error) against log(spacing)."""
    h = np.log(np.asarray(spacings, dtype=float))
    e = np.log(np.maximum(np.asarray(errors, dtype=float), 1e-300))
    return float(np.polyfit(h, e, 1)[0])


# ----------------------------------------------------------------------------
# mesh access


def mesh_lines(sol: Solution, family: str) -> list[list[CharNode]]:
    """Characteristic lines of one family ("plus" or "minus"), each ordered by x."""
    table = sol.lines_plus if family == "plus" else sol.lines_minus
    return [sorted(line, key=lambda n: n.x) for _, line in sorted(table.items()) if len(line) >= 2]


def _segments(sol: Solution, family: str):
    """Consecutive node pairs along lines of one family.

    Pairs closer than ``1e-6 h`` are skipped: bisection towards vacuum can
    place neighbouring lines that close, and a difference quotient over
    such a pair is pure rounding noise.
    """
    min_len = 1e-6 * sol.h
    for line in mesh_lines(sol, family):
        for a, b in zip(line, line[1:]):
            if math.hypot(b.x - a.x, b.y - a.y) > min_len:
                yield a, b


def _wall_nodes(sol: Solution, side: str) -> list[CharNode]:
    kind = WALL_LOWER if side == LOWER else WALL_UPPER
    corner = sol.inlet[0] if side == LOWER else sol.inlet[-1]
    return [corner] + sorted((n for n in sol.nodes if n.kind == kind), key=lambda n: n.x)


def _edges(sol: Solution):
    """Every mesh edge as ``(a, b, side)``; wall chords carry their side, others None."""
    for family in ("plus", "minus"):
        for a, b in _segments(sol, family):
            yield a, b, None
    for side in (LOWER, UPPER):
        wall = _wall_nodes(sol, side)
        for a, b in zip(wall, wall[1:]):
            yield a, b, side


def _node_values(n: CharNode) -> np.ndarray:
    return np.array([n.x, n.y, n.u, n.v, n.rho, n.s, n.c, n.E_hat, n.omega_over_rho, n.delta2,
                     n.tr.coupling, n.psi])


_X, _Y, _U, _V, _RHO, _S, _C, _E, _WR, _D2, _K, _PSI = range(12)


# ----------------------------------------------------------------------------
# streamlines


def trace_streamlines(sol: Solution, n_lines: int = 24) -> list[np.ndarray]:
    """Streamlines as level sets of the stream function on mesh edges.

    Each trace is an array of rows ``[x, y, u, v, rho, s, c, E_hat,
    omega/rho, delta2, coupling, psi]`` linearly interpolated at the edge
    crossings and ordered by x.  Levels are spaced evenly in the stream
    function, excluding the walls.
    """
    half = 0.5 * sol.model.inflow.psi_total
    levels = [-half + 2.0 * half * (k + 0.5) / n_lines for k in range(n_lines)]
    edges = [(a, b) for a, b, _ in _edges(sol)]
    pa = np.array([a.psi for a, _ in edges])
    pb = np.array([b.psi for _, b in edges])
    traces = []
    for lev in levels:
        hit = np.nonzero((np.minimum(pa, pb) <= lev) & (np.maximum(pa, pb) >= lev) & (pa != pb))[0]
        rows = []
        for k in hit:
            a, b = edges[k]
            t = (lev - a.psi) / (b.psi - a.psi)
            rows.append((1.0 - t) * _node_values(a) + t * _node_values(b))
        if len(rows) < 2:
            continue
        arr = np.array(sorted(rows, key=lambda r: (r[_X], r[_Y])))
        keep = np.ones(len(arr), dtype=bool)
        keep[1:] = np.hypot(np.diff(arr[:, _X]), np.diff(arr[:, _Y])) > 1e-12
        arr = arr[keep]
        arr[:, _PSI] = lev
        traces.append(arr)
    return traces


def _inlet_delta2(profile: InletProfile, g: GasConstants, y: float) -> float:
    """Scaled entropy derivative along C+ at the inlet, from the profile alone."""
    u, rho, s = profile.u(y), profile.rho(y), profile.s(y)
    c = sound_speed(rho, s, g)
    sin_a = c / u
    return profile.ds(y) * sin_a / c ** ((g.gamma + 1.0) / (g.gamma - 1.0))


def transport_residuals(sol: Solution, n_lines: int = 24, tol: float = 1e-8) -> DiagnosticsReport:
    """Invariance of delta2, entropy and Bernoulli value, and the vorticity law, along streamlines."""
    report = DiagnosticsReport("transport along streamlines")
    model = sol.model
    inflow, g = model.inflow, model.gas
    profile = inflow.profile
    nodes = sol.nodes

    # delta2 carried at each node versus its inlet value, recomputed from the profile
    d2 = [n.delta2 - _inlet_delta2(profile, g, inflow.label_from_psi(n.psi)) for n in nodes]
    report.checks.append(_check("delta2 carried", "delta2 = d+s / c^((g+1)/(g-1)) equals its inlet value",
                                d2, [(n.x, n.y) for n in nodes], tol))

    traces = trace_streamlines(sol, n_lines)
    report.notes.append(f"{len(traces)} streamlines traced")
    quad_res, quad_pts, e_res, s_res, pts = [], [], [], [], []
    for tr in traces:
        y0 = inflow.label_from_psi(tr[0, _PSI])
        u0, rho0, s0 = profile.u(y0), profile.rho(y0), profile.s(y0)
        c0 = sound_speed(rho0, s0, g)
        E0 = 0.5 * u0 * u0 + c0 * c0 / (g.gamma - 1.0)
        e_res += list(tr[:, _E] - E0)
        s_res += list(tr[:, _S] - s0)
        pts += list(tr[:, :2])
        k = tr[:, _D2] * tr[:, _K]
        c2 = tr[:, _C] ** 2
        # trapezoid quadrature of d(omega/rho) = -delta2 K d(c^2)
        rhs = -0.5 * (k[1:] + k[:-1]) * np.diff(c2)
        quad_res += list(np.diff(tr[:, _WR]) - rhs)
        quad_pts += list(0.5 * (tr[1:, :2] + tr[:-1, :2]))
    report.checks.append(_check("vorticity quadrature", "d(omega/rho) = -delta2 K d(c^2) along C0",
                                quad_res, quad_pts, None))
    report.checks.append(_check("Bernoulli invariance", "E_hat constant along C0", e_res, pts, None))
    report.checks.append(_check("entropy invariance", "s constant along C0", s_res, pts, None))
    return report


def vorticity_increment(delta2: float, coupling: float, c2_a: float, c2_b: float) -> float:
    """Exact change of omega/rho along a streamline between sound speeds c_a and c_b."""
    return -delta2 * coupling * (c2_b - c2_a)


# ----------------------------------------------------------------------------
# characteristic relations


def _mid(a: CharNode, b: CharNode) -> dict:
    return {
        "c": 0.5 * (a.c + b.c),
        "A": 0.5 * (a.A + b.A),
        "sigma": 0.5 * (a.sigma + b.sigma),
        "omega": 0.5 * (a.omega + b.omega),
        "s": 0.5 * (a.s + b.s),
    }


def char_relation_residuals(sol: Solution) -> DiagnosticsReport:
    """Residuals of the directional-derivative relations along both families."""
    report = DiagnosticsReport("characteristic relations")
    g = sol.model.gas
    kap = g.kappa
    res: dict[str, list[float]] = {k: [] for k in
                                   ("c d+beta", "c d+alpha", "c d-alpha", "c d-beta",
                                    "d+u", "d-u", "d+v", "d-v")}
    pts: dict[str, list] = {k: [] for k in res}

    def j_of(c, s):
        return c / (g.gamma * (g.gamma - 1.0) * s)

    for family in ("plus", "minus"):
        for a, b in _segments(sol, family):
            ell = math.hypot(b.x - a.x, b.y - a.y)
            m = _mid(a, b)
            c, A, sig, om, s = m["c"], m["A"], m["sigma"], m["omega"], m["s"]
            al, be = sig + A, sig - A
            j = j_of(c, s)
            D = {k: (getattr(b, k) - getattr(a, k)) / ell for k in ("c", "s", "u", "v", "alpha", "beta")}
            tA, s2A, sA2 = math.tan(A), math.sin(2.0 * A), math.sin(A) ** 2
            Om = (kap - 1.0) / (kap + 1.0) - tA * tA
            w = om * sA2 * tA
            pt = (0.5 * (a.x + b.x), 0.5 * (a.y + b.y))
            if family == "plus":
                r = {
                    "c d+beta": c * D["beta"] + (1 + kap) * tA * D["c"] - w - j * tA * D["s"],
                    "c d+alpha": (c * D["alpha"] + 0.5 * (1 + kap) * Om * s2A * D["c"] + w
                                  - j * tA * math.cos(2 * A) * D["s"]),
                    "d+u": D["u"] - (kap * math.sin(be) * D["c"] + om * math.cos(sig) * math.sin(A)
                                     - j * math.sin(be) * D["s"]),
                    "d+v": D["v"] - (-kap * math.cos(be) * D["c"] + om * math.sin(sig) * math.sin(A)
                                     + j * math.cos(be) * D["s"]),
                }
            else:
                r = {
                    "c d-alpha": c * D["alpha"] - (1 + kap) * tA * D["c"] - w + j * tA * D["s"],
                    "c d-beta": (c * D["beta"] - 0.5 * (1 + kap) * Om * s2A * D["c"] + w
                                 + j * tA * math.cos(2 * A) * D["s"]),
                    "d-u": D["u"] - (-kap * math.sin(al) * D["c"] - om * math.cos(sig) * math.sin(A)
                                     + j * math.sin(al) * D["s"]),
                    "d-v": D["v"] - (kap * math.cos(al) * D["c"] - om * math.sin(sig) * math.sin(A)
                                     - j * math.cos(al) * D["s"]),
                }
            for k, v in r.items():
                res[k].append(v)
                pts[k].append(pt)

    formulas = {
        "c d+beta": "c d+beta = -(1+kappa) tan A d+c + omega sin^2A tan A + j tan A d+s",
        "c d+alpha": "c d+alpha = -(1+kappa)/2 Omega sin2A d+c - omega sin^2A tan A + j tan A cos2A d+s",
        "c d-alpha": "c d-alpha = (1+kappa) tan A d-c + omega sin^2A tan A - j tan A d-s",
        "c d-beta": "c d-beta = (1+kappa)/2 Omega sin2A d-c - omega sin^2A tan A - j tan A cos2A d-s",
        "d+u": "d+u = kappa sin(beta) d+c + omega cos(sigma) sin A - j sin(beta) d+s",
        "d-u": "d-u = -kappa sin(alpha) d-c - omega cos(sigma) sin A + j sin(alpha) d-s",
        "d+v": "d+v = -kappa cos(beta) d+c + omega sin(sigma) sin A + j cos(beta) d+s",
        "d-v": "d-v = kappa cos(alpha) d-c - omega sin(sigma) sin A - j cos(alpha) d-s",
    }
    for k in res:
        report.checks.append(_check(k, formulas[k], res[k], pts[k], None))

    # d+s = -d-s at every node with neighbours on both sides along both lines
    ent, ent_pts = [], []
    nb_plus = _neighbours(sol, "plus")
    nb_minus = _neighbours(sol, "minus")
    kink_plus, kink_minus = kink_lines(sol)
    for n in sol.nodes:
        P, M = nb_plus.get(id(n)), nb_minus.get(id(n))
        if P is None or M is None or n.plus_id in kink_plus or n.minus_id in kink_minus:
            continue
        ent.append(_span_derivative(*P, "s") + _span_derivative(*M, "s"))
        ent_pts.append((n.x, n.y))
    report.checks.append(_check("d+s + d-s", "d+s = -d-s", ent, ent_pts, None))
    report.notes.append("d+s + d-s skips nodes on characteristics through junction points, "
                        "where first derivatives jump")
    return report


def kink_lines(sol: Solution) -> tuple[set[int], set[int]]:
    """Ids of the characteristics through the corners and junction points.

    The flow is only piecewise smooth across these lines: the wall
    curvature switches on at the inlet corners, and the resulting weak
    discontinuities reflect at every junction.
    """
    where = {(n.x, n.y): n for n in sol.nodes}
    plus, minus = set(), set()
    for name, xy in sol.points.items():
        n = where.get(xy)
        if n is None or name.startswith("V"):
            continue
        plus.add(n.plus_id)
        minus.add(n.minus_id)
    return plus, minus


def _neighbours(sol: Solution, family: str) -> dict[int, tuple[CharNode, CharNode]]:
    """Upstream and downstream neighbour of every interior node of a line."""
    out = {}
    for line in mesh_lines(sol, family):
        for a, n, b in zip(line, line[1:], line[2:]):
            if a.x < n.x < b.x:
                out[id(n)] = (a, b)
    return out


def _span_derivative(a: CharNode, b: CharNode, name: str) -> float:
    return (getattr(b, name) - getattr(a, name)) / math.hypot(b.x - a.x, b.y - a.y)


def residual_orders(coarse: DiagnosticsReport, fine: DiagnosticsReport, ratio: float = 2.0) -> dict[str, float]:
    """Observed order of each check's maximum residual between two resolutions."""
    orders = {}
    for c in coarse.checks:
        f = fine.check(c.name)
        if c.max_residual <= ROUNDOFF or f.max_residual <= ROUNDOFF:
            orders[c.name] = math.inf
        else:
            orders[c.name] = math.log(c.max_residual / f.max_residual) / math.log(ratio)
    return orders


# ----------------------------------------------------------------------------
# conservation


def _station_samples(sol: Solution, x: float) -> np.ndarray:
    rows = []
    duct = sol.model.duct
    for a, b, side in _edges(sol):
        lo, hi = (a, b) if a.x <= b.x else (b, a)
        if not lo.x <= x <= hi.x:
            continue
        t = 0.0 if hi.x == lo.x else (x - lo.x) / (hi.x - lo.x)
        row = (1.0 - t) * _node_values(lo) + t * _node_values(hi)
        if side is not None:
            row[_Y] = duct.wall_y(x, side)  # the chord cuts the convex wall
        rows.append(row)
    if not rows:
        return np.empty((0, 12))
    arr = np.array(sorted(rows, key=lambda r: r[_Y]))
    keep = np.ones(len(arr), dtype=bool)
    keep[1:] = np.diff(arr[:, _Y]) > 1e-13
    return arr[keep]


def _interface_x(sol: Solution, side: str) -> float | None:
    for vi in sol.vacuum_interfaces:
        if vi.side == side:
            return vi.x
    return None


def station_fluxes(sol: Solution, x: float) -> dict[str, float]:
    """Mass, energy and x-momentum fluxes through the section at ``x``.

    Raises StationOutsideGas when the mesh does not span the gas part of
    the section.  Sides bounded by a vacuum interface are integrated over
    the resolved gas only.
    """
    duct = sol.model.duct
    g = sol.model.gas
    if x < 0.0 or not math.isfinite(x):
        raise StationOutsideGas(f"station x={x!r} lies outside the duct")
    arr = _station_samples(sol, x)
    if len(arr) < 2:
        raise StationOutsideGas(f"station x={x!r} does not cut the computed mesh")
    f = duct.f(x)
    tol = 1e-9 * max(1.0, f)
    ys = arr[:, _Y]
    for side, y_end, wall_y in ((LOWER, ys[0], -f), (UPPER, ys[-1], f)):
        xv = _interface_x(sol, side)
        if abs(y_end - wall_y) > tol and not (xv is not None and x >= xv):
            raise StationOutsideGas(
                f"station x={x!r} is not spanned by the mesh: covered [{ys[0]:.6g}, {ys[-1]:.6g}], "
                f"duct [{-f:.6g}, {f:.6g}]")
    gaps = np.diff(ys)
    if gaps.max() > 0.5 * f:
        raise StationOutsideGas(f"station x={x!r} crosses an unresolved gap of width {gaps.max():.3g}")
    rho, u, E = arr[:, _RHO], arr[:, _U], arr[:, _E]
    p = arr[:, _S] * rho**g.gamma
    return {
        "mass": float(np.trapezoid(rho * u, ys)),
        "energy": float(np.trapezoid(rho * u * E, ys)),
        "momentum": float(np.trapezoid(rho * u * u + p, ys)),
        "y_low": float(ys[0]),
        "y_high": float(ys[-1]),
    }


def _wall_force(sol: Solution, side: str, x_end: float) -> float:
    """Integral of p f' along one wall from the inlet to ``x_end``."""
    g, duct = sol.model.gas, sol.model.duct
    wall = _wall_nodes(sol, side)
    xs = np.array([n.x for n in wall])
    ps = np.array([n.s * n.rho**g.gamma for n in wall])
    xv = _interface_x(sol, side)
    if xv is not None:
        xs, ps = np.append(xs, xv), np.append(ps, 0.0)
    if x_end > xs[-1]:
        xs, ps = np.append(xs, x_end), np.append(ps, 0.0 if xv is not None else ps[-1])
    grid = np.union1d(xs[xs < x_end], [x_end])
    pg = np.interp(grid, xs, ps)
    fp = np.array([duct.f_prime(t) for t in grid])
    return float(np.trapezoid(pg * fp, grid))


def inlet_fluxes(sol: Solution) -> dict[str, float]:
    inflow = sol.model.inflow
    prof, g = inflow.profile, inflow.gas
    f0 = inflow.f0

    def energy(y):
        u, rho, s = prof.u(y), prof.rho(y), prof.s(y)
        c = sound_speed(rho, s, g)
        return rho * u * (0.5 * u * u + c * c / (g.gamma - 1.0))

    def momentum(y):
        u, rho, s = prof.u(y), prof.rho(y), prof.s(y)
        return rho * u * u + s * rho**g.gamma

    return {
        "mass": inflow.psi_total,
        "energy": quad(energy, -f0, f0, epsabs=0.0, epsrel=1e-13, limit=200)[0],
        "momentum": quad(momentum, -f0, f0, epsabs=0.0, epsrel=1e-13, limit=200)[0],
    }


def flux_audit(sol: Solution, stations, tol: float = 1e-3) -> DiagnosticsReport:
    """Mass and energy flux through each station against the inlet values."""
    stations = list(stations)
    if not stations:
        raise InvalidParameter("flux audit needs at least one station")
    report = DiagnosticsReport("flux audit")
    ref = inlet_fluxes(sol)
    rows = {x: station_fluxes(sol, x) for x in stations}
    pts = [(x, 0.0) for x in stations]
    for key, rel in (("mass", "integral of rho u dy is the same at every station"),
                     ("energy", "integral of rho u E_hat dy is the same at every station")):
        dev = [(rows[x][key] - ref[key]) / ref[key] for x in stations]
        report.checks.append(_check(f"{key} flux", rel, dev, pts, tol))
    mom = []
    for x in stations:
        force = _wall_force(sol, LOWER, x) + _wall_force(sol, UPPER, x)
        mom.append((rows[x]["momentum"] - ref["momentum"] - force) / ref["momentum"])
    report.checks.append(_check("momentum flux", "momentum flux change equals the wall pressure force",
                                mom, pts, None))
    report.notes.append(f"inlet fluxes: mass={ref['mass']!r} energy={ref['energy']!r}")
    for x in stations:
        r = rows[x]
        report.notes.append(f"station x={x!r}: mass={r['mass']!r} energy={r['energy']!r} "
                            f"gas=[{r['y_low']:.6g}, {r['y_high']:.6g}]")
    return report


# ----------------------------------------------------------------------------
# sign monitors and symmetry


def monotonicity_monitors(sol: Solution, tol: float | None = None, n_lines: int = 24) -> DiagnosticsReport:
    """Non-positivity of d+-c and R+- = d+-c - j d+-s / kappa, and c along streamlines.

    The default tolerance ``1e-8 c0 / h`` absorbs rounding in two-point
    differences over segments of length ~h.
    """
    report = DiagnosticsReport("sign monitors")
    g = sol.model.gas
    c0 = sol.model.inflow.c0
    tol = 1e-8 * c0 / sol.h if tol is None else tol
    # with entropy gradients only R+- is signed; d+-c alone is then informational
    dc_tol = tol if sol.model.inflow.uniform else None
    wave = {r.name for r in sol.regions if r.kind != "laminar"}
    for family, sign in (("plus", "+"), ("minus", "-")):
        dc, R, pts = [], [], []
        strict = 0
        for a, b in _segments(sol, family):
            if a.region not in wave or b.region not in wave:
                continue
            ell = math.hypot(b.x - a.x, b.y - a.y)
            d_c = (b.c - a.c) / ell
            d_s = (b.s - a.s) / ell
            c, s = 0.5 * (a.c + b.c), 0.5 * (a.s + b.s)
            j = c / (g.gamma * (g.gamma - 1.0) * s)
            Rv = d_c - j * d_s / g.kappa
            dc.append(max(d_c, 0.0))
            R.append(max(Rv, 0.0))
            strict += Rv < 0.0
            pts.append((0.5 * (a.x + b.x), 0.5 * (a.y + b.y)))
        report.checks.append(_check(f"d{sign}c <= 0", f"sound speed non-increasing along C{sign}", dc, pts,
                                    dc_tol))
        report.checks.append(_check(f"R{sign} <= 0", f"R{sign} = d{sign}c - j d{sign}s / kappa non-positive",
                                    R, pts, tol))
        report.notes.append(f"R{sign} strictly negative on {strict} of {len(R)} wave-region segments")
    rises, pts = [], []
    for tr in trace_streamlines(sol, n_lines):
        d = np.diff(tr[:, _C])
        rises += list(np.maximum(d, 0.0))
        pts += list(tr[1:, :2])
    report.checks.append(_check("c along C0", "sound speed non-increasing along streamlines", rises, pts, tol))
    return report


def symmetry_check(sol: Solution, tol: float = 1e-8) -> DiagnosticsReport:
    """Mirror symmetry about the axis, matched node by node."""
    report = DiagnosticsReport("symmetry")
    nodes = sol.nodes
    xy = np.array([(n.x, n.y) for n in nodes])
    tree = cKDTree(xy)
    dist, idx = tree.query(np.column_stack([xy[:, 0], -xy[:, 1]]))
    scale = 1e-9 * max(1.0, sol.model.duct.f0)
    dev, pts = [], []
    unmatched = 0
    for n, d, k in zip(nodes, dist, idx):
        if d > scale:
            unmatched += 1
            continue
        m = nodes[k]
        dev.append(max(d, abs(n.u - m.u), abs(n.v + m.v), abs(n.rho - m.rho), abs(n.s - m.s)))
        pts.append((n.x, n.y))
    report.checks.append(_check("mirror symmetry", "state(x, -y) = reflected state(x, y)", dev, pts, tol))
    axis = [n for n in nodes if abs(n.y) <= 1e-12 * max(1.0, abs(n.x))]
    report.checks.append(_check("axis v", "v = 0 on the axis", [n.v for n in axis],
                                [(n.x, n.y) for n in axis], tol))
    if unmatched:
        report.notes.append(f"{unmatched} nodes have no mirror partner (one-sided wall refinement)")
    return report


def interface_deviation(sol: Solution) -> DiagnosticsReport:
    """Distance of the gas nodes closing in on each vacuum interface from its tangent ray.

    The sampled nodes are every resolved node on the characteristics that
    leave the wall within one inlet spacing upstream of the onset point.
    """
    report = DiagnosticsReport("vacuum interfaces")
    h = sol.h
    for vi in sol.vacuum_interfaces:
        kind = WALL_LOWER if vi.side == LOWER else WALL_UPPER
        table = sol.lines_plus if vi.side == LOWER else sol.lines_minus
        ids = {n.plus_id if vi.side == LOWER else n.minus_id
               for n in sol.nodes if n.kind == kind and vi.x - h <= n.x <= vi.x}
        nodes = [n for k in ids for n in table[k]]
        dist = [vi.distance(n.x, n.y) for n in nodes]
        report.checks.append(_check(f"interface {vi.side}", "last resolved nodes lie on the tangent ray",
                                    dist, [(n.x, n.y) for n in nodes], 5.0 * h * h))
        report.notes.append(f"{vi.side} interface: x_V={vi.x!r} y_V={vi.y!r} slope={vi.slope!r}")
    return report


# ----------------------------------------------------------------------------
# simple-wave oracle


def _fan_region(sol: Solution):
    inflow = sol.model.inflow
    if not inflow.uniform:
        raise InvalidParameter("the simple-wave oracle needs uniform inflow")
    fan = build_fan(FlowState(inflow.u0, 0.0, inflow.rho0, inflow.s0), sol.model.gas)
    return fan, sol.region("S0-")


def oracle_state_error(sol: Solution) -> tuple[float, tuple[float, float]]:
    """Largest relative state error in the lower wall region against the closed-form fan."""
    fan, region = _fan_region(sol)
    duct = sol.model.duct
    inflow = sol.model.inflow
    worst, where = 0.0, (0.0, 0.0)
    for n in region.nodes:
        try:
            ex = oracle_field(fan, duct, n.x, n.y)
        except OutOfRegion:
            continue
        e = max(abs(n.u - ex.u) / inflow.u0, abs(n.v - ex.v) / inflow.u0, abs(n.rho - ex.rho) / inflow.rho0)
        if e > worst:
            worst, where = e, (n.x, n.y)
    return worst, where


def exact_wall_hit(fan, duct: DuctGeometry, start: CharNode) -> float:
    """Wall abscissa reached by the exact C- characteristic through ``start``.

    ``start`` must lie on the first fan line (the C+ from the lower corner).
    The C- curve is written as r(xi), the distance along the straight fan
    line leaving the wall at xi, and integrated until r vanishes.
    """
    mu = fan.gas.mu

    def theta(xi):
        return fan.theta_0 if xi <= 0.0 else invert_sigma(fan, -math.atan(duct.f_prime(xi)))

    def rhs(xi, r):
        th = theta(xi)
        pt = fan_state(fan, th)
        A, be = pt.A, pt.beta
        fp = duct.f_prime(xi)
        w = mu * (fan.theta_star - th)
        sw2, cw2 = math.sin(w) ** 2, math.cos(w) ** 2
        dsig_dth = (1.0 - mu * mu) * sw2 / (sw2 + mu * mu * cw2)
        dth = (-duct.f_second(xi) / (1.0 + fp * fp)) / dsig_dth
        return [((math.sin(be) + fp * math.cos(be)) - r[0] * dth * math.cos(2.0 * A)) / math.sin(2.0 * A)]

    def hit(xi, r):
        return r[0]

    hit.terminal = True
    hit.direction = -1
    r0 = math.hypot(start.x, start.y + duct.f0)
    span = 1.0
    while True:
        sol = solve_ivp(rhs, (0.0, span), [r0], method="DOP853", rtol=1e-12, atol=1e-13, events=hit)
        if sol.t_events[0].size:
            return float(sol.t_events[0][0])
        span *= 2.0
        if span > 1e6:
            raise OutOfRegion("exact characteristic does not reach the wall")


def wall_hit_error(sol: Solution) -> float:
    """Largest wall-abscissa error of the lattice C- lines in the lower wall region."""
    fan, region = _fan_region(sol)
    duct = sol.model.duct
    first = {n.minus_id: n for n in sol.lines_plus[0]}
    worst = 0.0
    for w in region.boundary["wall"]:
        start = first.get(w.minus_id)
        if start is None or start.x == 0.0:
            continue
        worst = max(worst, abs(w.x - exact_wall_hit(fan, duct, start)))
    return worst


def convergence_order(profile: InletProfile, duct: DuctGeometry, cfg: SolverConfig, resolutions,
                      gas: GasConstants | None = None) -> DiagnosticsReport:
    """Lower-wall-region errors against the simple-wave oracle over a resolution ladder."""
    resolutions = [int(n) for n in resolutions]
    if len(set(resolutions)) != len(resolutions):
        raise InvalidParameter("resolutions must be distinct")
    if len(resolutions) < 3:
        raise InvalidParameter("a convergence study needs at least three resolutions")
    if not profile.uniform:
        raise InvalidParameter("the simple-wave oracle needs uniform inflow")
    resolutions.sort()
    cfg = dataclasses.replace(cfg, max_regions=3)
    report = DiagnosticsReport("simple-wave convergence")
    hs, state, hits = [], [], []
    for N in resolutions:
        sol = orchestrate(profile, duct, cfg, N, gas)
        hs.append(sol.h)
        err, where = oracle_state_error(sol)
        state.append(err)
        hits.append(wall_hit_error(sol))
        report.notes.append(f"N={N}: state error {err:.3e} at ({where[0]:.6g}, {where[1]:.6g}), "
                            f"wall-hit error {hits[-1]:.3e}")
    for name, errs in (("state error", state), ("wall-hit abscissa", hits)):
        reliable = min(errs) > ROUNDOFF
        report.convergence.append(Convergence(name, resolutions, hs, errs, fitted_order(hs, errs), reliable))
    return report


def diagnose(sol: Solution, stations=None) -> DiagnosticsReport:
    """Every check that applies to ``sol``."""
    report = DiagnosticsReport("diagnostics")
    report.extend(transport_residuals(sol))
    report.extend(char_relation_residuals(sol))
    report.extend(monotonicity_monitors(sol))
    report.extend(symmetry_check(sol))
    if sol.vacuum_interfaces:
        report.extend(interface_deviation(sol))
    if stations is None:
        stations = default_stations(sol)
    if stations:
        report.extend(flux_audit(sol, stations))
    if sol.model.inflow.uniform:
        err, where = oracle_state_error(sol)
        report.checks.append(Check("simple-wave oracle", "lower wall region equals the closed-form fan",
                                   err, err, where, 1e-4, len(sol.region("S0-").nodes)))
    return report


def default_stations(sol: Solution, count: int = 5) -> list[float]:
    """Evenly spaced stations inside the fully resolved part of the mesh."""
    x_end = _resolved_length(sol)
    if x_end <= 0.0:
        return [0.0]
    return [x_end * k / count for k in range(count)]


def _resolved_length(sol: Solution) -> float:
    # the section is spanned up to the last closed junction on both walls, or up to vacuum onset
    lows = [xy[0] for k, xy in sol.points.items() if k.startswith("B") and k != "B"]
    highs = [xy[0] for k, xy in sol.points.items() if k.startswith("D") and k != "D"]
    cands = []
    if lows and highs:
        cands.append(min(max(lows), max(highs)))
    for vi in sol.vacuum_interfaces:
        cands.append(vi.x)
    if not cands:
        p = sol.points.get("P")
        return 0.0 if p is None else p[0]
    return min(cands)
