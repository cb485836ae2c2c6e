"""
Global construction of the duct flow on a characteristic lattice.

Every C+ and C- line carries an integer id and keeps its ordered node list
across region boundaries, so a node is the intersection of one line of
each family.  Regions are filled in the order laminar core, lower and
upper wall regions, interaction (Goursat) region, wall regions again, and
so on, until the walls stop reflecting, vacuum forms, or ``x_max`` cuts the
duct off.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

from scipy.optimize import brentq

from .duct_geometry import LOWER, UPPER, DuctGeometry
from .errors import CaseTwoDetected, CorrectorDiverged, DuctMocError, NoIntersection, NoWallHit, VacuumReached
from .gas_state import GasConstants
from .inflow import InflowModel, InletProfile
from .moc_kernel import (
    INTERIOR,
    CharNode,
    FlowModel,
    Front,
    SolverConfig,
    VacuumInterface,
    inlet_discretize,
    interior_point,
    vacuum_interface,
    wall_point,
)

LAMINAR = "laminar"
WALL_REGION = {LOWER: "wall_lower", UPPER: "wall_upper"}
GOURSAT = "goursat"

# termination cases
NON_INTERSECTION = "non_intersection"
OPEN_WALLS = "open_walls"
VACUUM_CASE = "vacuum"
X_MAX = "x_max"
MAX_REGIONS = "max_regions"
FAILED = "failed"


@dataclass
class Region:
    kind: str
    name: str
    index: int
    nodes: list[CharNode] = field(default_factory=list)
    boundary: dict[str, list[CharNode]] = field(default_factory=dict)
    junctions: dict[str, tuple[float, float]] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)


@dataclass
class Termination:
    case: str
    detail: str


@dataclass
class Solution:
    regions: list[Region]
    lines_plus: dict[int, list[CharNode]]
    lines_minus: dict[int, list[CharNode]]
    vacuum_interfaces: list[VacuumInterface]
    termination: Termination
    points: dict[str, tuple[float, float]]
    model: FlowModel
    inlet: list[CharNode]
    h: float
    reflection_case: str = "i"

    @property
    def nodes(self) -> list[CharNode]:
        return [n for r in self.regions for n in r.nodes]

    def region(self, name: str) -> Region:
        for r in self.regions:
            if r.name == name:
                return r
        raise KeyError(name)


class Lattice:
    """Registry of characteristic lines keyed by id."""

    def __init__(self, first_free_id: int):
        self.plus: dict[int, list[CharNode]] = {}
        self.minus: dict[int, list[CharNode]] = {}
        self._next = first_free_id

    def new_id(self) -> int:
        self._next += 1
        return self._next - 1

    def add(self, node: CharNode, plus_id: int, minus_id: int) -> CharNode:
        node.plus_id, node.minus_id = plus_id, minus_id
        self.plus.setdefault(plus_id, []).append(node)
        self.minus.setdefault(minus_id, []).append(node)
        return node

    def insert(self, node: CharNode, plus_id: int, minus_id: int) -> CharNode:
        """Like :meth:`add`, but keeps existing lines ordered by abscissa."""
        node.plus_id, node.minus_id = plus_id, minus_id
        for table, key in ((self.plus, plus_id), (self.minus, minus_id)):
            line = table.setdefault(key, [])
            pos = len(line)
            while pos > 0 and line[pos - 1].x > node.x:
                pos -= 1
            line.insert(pos, node)
        return node


class DataLine:
    """Incoming characteristic of a wall region, refinable between its nodes.

    ``nodes[0]`` lies on the wall; ``nodes[k]`` starts marching line ``k``.
    ``exact`` optionally maps a fractional index to an exact node.
    """

    def __init__(self, nodes: list[CharNode], model: FlowModel,
                 exact: Callable[[float], CharNode] | None = None):
        self.nodes = nodes
        self.model = model
        self.exact = exact
        self._front: Front | None = None

    def at(self, tau: float) -> CharNode:
        k = int(math.floor(tau))
        if tau == k:
            return self.nodes[k]
        if self.exact is not None:
            return self.exact(tau)
        if self._front is None:
            self._front = Front(self.nodes)
        fr = self._front
        t = fr.param[k] + (tau - k) * (fr.param[k + 1] - fr.param[k])
        psi = fr.at(t, "psi")
        m = self.model
        return m.make_node(fr.at(t, "x"), fr.at(t, "y"), fr.at(t, "sigma"), fr.at(t, "nu"), psi,
                           m.inflow.transport(psi), INTERIOR, self.nodes[k].A)


# ----------------------------------------------------------------------------
# laminar core


def solve_initial_region(inlet: list[CharNode], model: FlowModel, lattice: Lattice) -> tuple[Region, dict]:
    """Undisturbed region bounded by the inlet and the two characteristics from the wall corners."""
    N = len(inlet)
    inflow = model.inflow
    G = [inflow.G(n.y) for n in inlet]
    region = Region(LAMINAR, "S0", 0)
    grid: dict[tuple[int, int], CharNode] = {}
    for k, n in enumerate(inlet):
        grid[k, k] = n
        n.i = n.j = k
    for i in range(N):
        for j in range(i + 1, N):
            x = 0.5 * (G[j] - G[i])
            if i + j == N - 1:
                y = 0.0
            elif i + j > N - 1:
                y = -grid[N - 1 - j, N - 1 - i].y  # mirror partner already built
            else:
                y = inflow.y_from_G(0.5 * (G[i] + G[j]))
            n = model.laminar_node(x, y)
            n.i, n.j = i, j
            grid[i, j] = n
    for i in range(N):
        for j in range(i, N):
            n = grid[i, j]
            n.plus_id, n.minus_id = i, j
            n.region = region.name
            region.nodes.append(n)
    for i in range(N):
        lattice.plus[i] = [grid[i, j] for j in range(i, N)]
        lattice.minus[i] = [grid[k, i] for k in range(i, -1, -1)]
    P = grid[0, N - 1]
    region.boundary = {
        "inlet": list(inlet),
        "plus_from_B": lattice.plus[0][:],
        "minus_from_D": lattice.minus[N - 1][:],
    }
    region.junctions = {"B": (inlet[0].x, inlet[0].y), "D": (inlet[-1].x, inlet[-1].y), "P": (P.x, P.y)}

    def exact_lower(tau: float) -> CharNode:
        # node where the C+ from the lower corner meets the C- from fractional inlet index tau
        k = int(math.floor(tau))
        yt = inlet[k].y + (tau - k) * (inlet[k + 1].y - inlet[k].y)
        Gt = inflow.G(yt)
        return model.laminar_node(0.5 * (Gt - G[0]), inflow.y_from_G(0.5 * (G[0] + Gt)))

    def exact_upper(tau: float) -> CharNode:
        k = int(math.floor(tau))
        a, b = inlet[N - 1 - k], inlet[N - 2 - k]
        yt = a.y + (tau - k) * (b.y - a.y)
        Gt = inflow.G(yt)
        return model.laminar_node(0.5 * (G[-1] - Gt), inflow.y_from_G(0.5 * (G[-1] + Gt)))

    data = {
        LOWER: DataLine(lattice.plus[0][:], model, exact_lower),
        UPPER: DataLine(lattice.minus[N - 1][:], model, exact_upper),
    }
    return region, data


# ----------------------------------------------------------------------------
# wall regions


@dataclass
class WallOutcome:
    region: Region
    closing: list[CharNode]  # marching line through the data line's far end, from that end onward
    status: str  # "wall" | "vacuum" | "no_wall" | "x_max" | "stopped" | "diverged"
    interface: VacuumInterface | None = None


@dataclass
class _Spawned:
    line_id: int
    tail: CharNode
    tail_line: int  # index of the marching line that produced ``tail``


def _march_line(start: CharNode, spawned: list[_Spawned], prev_line: int, side: str,
                model: FlowModel) -> tuple[list[CharNode], CharNode | None, str, Exception | None]:
    """Cross the spawned lines in order, then reach the wall.  Nothing is registered."""
    lower = side == LOWER
    x_max = model.cfg.x_max
    nodes: list[CharNode] = []
    prev = start
    for sp in spawned:
        if sp.tail_line != prev_line:
            return nodes, None, "stopped", None
        try:
            n = interior_point(sp.tail, prev, model) if lower else interior_point(prev, sp.tail, model)
        except VacuumReached as exc:
            return nodes, None, "vacuum", exc
        except NoIntersection as exc:
            return nodes, None, "stopped", exc
        except CorrectorDiverged as exc:
            return nodes, None, "diverged", exc
        if n.x > x_max:
            return nodes, None, "x_max", None
        nodes.append(n)
        prev = n
    try:
        w = wall_point(prev, side, model)
    except VacuumReached as exc:
        return nodes, None, "vacuum", exc
    except NoWallHit as exc:
        return nodes, None, "no_wall", exc
    except CorrectorDiverged as exc:
        return nodes, None, "diverged", exc
    if w.x > x_max:
        return nodes, None, "x_max", None
    return nodes, w, "wall", None


def _vacuum_onset(wall: CharNode, side: str, model: FlowModel) -> float | None:
    """Wall abscissa where the incoming invariant at ``wall`` forces vacuum.

    The wall-reaching invariant (sigma + nu on the lower wall, sigma - nu on
    the upper one) is carried to the wall while nu climbs to its maximum;
    the onset is where the slip angle matches.  Exact for simple waves.
    """
    duct = model.duct
    if side == LOWER:
        target = -(wall.sigma + wall.nu - model.nu_max)
    else:
        target = wall.sigma - wall.nu + model.nu_max
    if not 0.0 < target < math.atan(duct.f_prime_inf):
        return None
    slope = math.tan(target)
    lo = wall.x
    if duct.f_prime(lo) >= slope:
        return lo
    hi = max(2.0 * lo, duct.f0)
    while duct.f_prime(hi) < slope:
        hi *= 2.0
        if hi > 1e12:
            return None
    return brentq(lambda x: duct.f_prime(x) - slope, lo, hi, xtol=1e-15, rtol=1e-15)


def solve_wall_region(data: DataLine, side: str, model: FlowModel, lattice: Lattice, name: str,
                      index: int) -> WallOutcome:
    """Slip-wall region between an incoming characteristic and one wall.

    Lower wall: the data is a C+ line and C- lines are marched down to the
    wall, each wall node spawning a new C+ line.  The upper wall mirrors
    this with the families swapped.  Extra marching lines are inserted from
    the data characteristic by bisection wherever a line misses the wall,
    hits vacuum, or turns the wall state by more than the allowed angle;
    the bisection also pins down the vacuum onset.
    """
    lower = side == LOWER
    region = Region(WALL_REGION[side], name, index)
    d = data.nodes
    M = len(d) - 1
    spawned: list[_Spawned] = []
    min_gap = 2.0 ** -model.cfg.max_refinements
    turn_limit = model.wall_turn_limit
    st_ = {"line_no": 0, "tau": 0.0, "sigma": d[0].sigma}
    interface: VacuumInterface | None = None

    def register(start: CharNode, nodes: list[CharNode], wall: CharNode | None, inserted: bool):
        st_["line_no"] += 1
        line_no = st_["line_no"]
        if inserted:
            mid = lattice.new_id()
            if lower:
                lattice.insert(start, d[0].plus_id, mid)
            else:
                lattice.insert(start, mid, d[0].minus_id)
            start.region, start.i, start.j = name, line_no, -1
            region.nodes.append(start)
        else:
            mid = start.minus_id if lower else start.plus_id
        for sp, n in zip(spawned, nodes):
            if lower:
                lattice.add(n, sp.line_id, mid)
            else:
                lattice.add(n, mid, sp.line_id)
            sp.tail, sp.tail_line = n, line_no
            n.region, n.i, n.j = name, line_no, sp.line_id
            region.nodes.append(n)
        if wall is not None:
            new_id = lattice.new_id()
            if lower:
                lattice.add(wall, new_id, mid)
            else:
                lattice.add(wall, mid, new_id)
            wall.region, wall.i, wall.j = name, line_no, new_id
            region.nodes.append(wall)
            spawned.append(_Spawned(new_id, wall, line_no))
            st_["sigma"] = wall.sigma
            st_["wall"] = wall

    def advance(tau: float) -> str:
        """Accept the marching line at ``tau``, refining before it as needed."""
        while True:
            try:
                start = data.at(tau)
            except VacuumReached:
                return "vacuum"
            nodes, wall, status, _ = _march_line(start, spawned, st_["line_no"], side, model)
            narrow = tau - st_["tau"] <= min_gap * max(1.0, tau)
            refinable = interface is None and not narrow
            if status == "wall":
                if abs(wall.sigma - st_["sigma"]) <= turn_limit or not refinable:
                    register(start, nodes, wall, tau != int(tau))
                    st_["tau"] = tau
                    return "wall"
            elif status not in ("vacuum", "no_wall", "diverged") or not refinable:
                return status
            res = advance(0.5 * (st_["tau"] + tau))
            if res != "wall":
                return res

    closing: list[CharNode] = [d[-1]]
    status = "wall"
    for k in range(1, M + 1):
        res = advance(float(k))
        if res == "wall":
            if k == M:
                line = lattice.minus[d[k].minus_id] if lower else lattice.plus[d[k].plus_id]
                closing = line[line.index(d[k]):]
            continue
        if res in ("vacuum", "no_wall", "diverged") and interface is None and spawned:
            x_v = _vacuum_onset(st_["wall"], side, model)
            if x_v is not None:
                interface = vacuum_interface(model.duct, x_v, side)
                region.junctions["V"] = (interface.x, interface.y)
        # a genuine lattice line that ends inside the gas: keep what it resolved
        nodes, wall, res, _ = _march_line(d[k], spawned, st_["line_no"], side, model)
        register(d[k], nodes, wall, False)
        if k == M:
            closing = [d[k]] + nodes + ([wall] if wall is not None else [])
            status = "wall" if wall is not None else res
    if status == "wall":
        key = "B" if lower else "D"
        region.junctions[key] = (closing[-1].x, closing[-1].y)
    elif interface is not None:
        status = "vacuum"
    region.boundary = {
        "incoming": list(d),
        "closing": closing,
        "wall": [n for n in region.nodes if n.kind.startswith("wall")],
    }
    return WallOutcome(region, closing, status, interface)


# ----------------------------------------------------------------------------
# interaction regions


@dataclass
class GoursatOutcome:
    region: Region
    corner: CharNode | None
    next_lower: list[CharNode]  # C+ line from the lower end of the C- data
    next_upper: list[CharNode]  # C- line from the upper end of the C+ data
    reason: str  # "corner" | NON_INTERSECTION | X_MAX


def solve_goursat(char_minus: list[CharNode], char_plus: list[CharNode], model: FlowModel,
                  lattice: Lattice, name: str, index: int) -> GoursatOutcome:
    """Fill the index rectangle spanned by two characteristics sharing their first node.

    ``char_minus`` runs from the corner along a C- line; each of its nodes
    starts a C+ line.  ``char_plus`` runs along a C+ line; each of its nodes
    starts a C- line.
    """
    if char_minus[0] is not char_plus[0]:
        raise ValueError("interaction data must share the corner node")
    region = Region(GOURSAT, name, index)
    x_max = model.cfg.x_max
    Am, Bm = len(char_minus) - 1, len(char_plus) - 1
    grid: dict[tuple[int, int], CharNode] = {}
    for a, n in enumerate(char_minus):
        grid[a, 0] = n
    for b, n in enumerate(char_plus):
        grid[0, b] = n
    hit_x_max = False
    for a in range(1, Am + 1):
        pid = char_minus[a].plus_id
        for b in range(1, Bm + 1):
            L, R = grid.get((a, b - 1)), grid.get((a - 1, b))
            if L is None or R is None:
                continue
            try:
                n = interior_point(L, R, model)
            except (NoIntersection, VacuumReached):
                continue
            if n.x > x_max:
                hit_x_max = True
                continue
            lattice.add(n, pid, char_plus[b].minus_id)
            n.region, n.i, n.j = name, a, b
            grid[a, b] = n
            region.nodes.append(n)
    corner = grid.get((Am, Bm))

    def run(key):
        out = []
        for t in range(0, max(Am, Bm) + 1):
            n = grid.get(key(t))
            if n is None:
                break
            out.append(n)
        return out

    next_lower = run(lambda b: (Am, b)) if Bm >= 0 else []
    next_upper = run(lambda a: (a, Bm))
    region.boundary = {
        "incoming_minus": list(char_minus),
        "incoming_plus": list(char_plus),
        "outgoing_plus": next_lower,
        "outgoing_minus": next_upper,
    }
    if corner is not None:
        reason = "corner"
        region.junctions[f"P{index}"] = (corner.x, corner.y)
    elif hit_x_max:
        reason = X_MAX
    else:
        reason = NON_INTERSECTION
        if _diverging(next_lower, next_upper, model):
            region.notes.append("boundary characteristics separate monotonically over the guard horizon")
    return GoursatOutcome(region, corner, next_lower, next_upper, reason)


def _diverging(plus_line: list[CharNode], minus_line: list[CharNode], model: FlowModel) -> bool:
    """Monotone growth of the vertical gap between two polylines over the guard horizon."""
    if len(plus_line) < 2 or len(minus_line) < 2:
        return False
    guard = model.cfg.dx_guard if model.cfg.dx_guard is not None else 10.0 * model.duct.f0
    x0 = max(plus_line[0].x, minus_line[0].x)
    x1 = min(plus_line[-1].x, minus_line[-1].x, x0 + guard)
    if x1 <= x0:
        return False
    xs = [x0 + (x1 - x0) * t / 16 for t in range(17)]

    def y_on(line, x):
        for a, b in zip(line, line[1:]):
            if a.x <= x <= b.x and b.x > a.x:
                return a.y + (b.y - a.y) * (x - a.x) / (b.x - a.x)
        return None

    gaps = []
    for x in xs:
        ya, yb = y_on(minus_line, x), y_on(plus_line, x)
        if ya is None or yb is None:
            return False
        gaps.append(ya - yb)
    return all(g2 >= g1 for g1, g2 in zip(gaps, gaps[1:]))


# ----------------------------------------------------------------------------
# orchestration


def build_model(profile: InletProfile, duct: DuctGeometry, cfg: SolverConfig,
                gas: GasConstants | None = None) -> FlowModel:
    gas = gas or GasConstants()
    return FlowModel(InflowModel(profile, gas), duct, cfg)


def orchestrate(profile: InletProfile, duct: DuctGeometry, cfg: SolverConfig, N: int,
                gas: GasConstants | None = None) -> Solution:
    """Assemble the full solution region by region."""
    model = build_model(profile, duct, cfg, gas)
    if cfg.max_wall_turn is None:
        model.wall_turn_limit = 2.0 / (N - 1)
    inlet = inlet_discretize(profile, duct, N, model)
    lattice = Lattice(N)
    regions: list[Region] = []
    points: dict[str, tuple[float, float]] = {}
    interfaces: list[VacuumInterface] = []

    core, data = solve_initial_region(inlet, model, lattice)
    regions.append(core)
    points.update(core.junctions)
    reflection_case = "i"
    termination: Termination | None = None
    lower_data, upper_data = data[LOWER], data[UPPER]
    strips = False
    level = 0
    N_h = 2.0 * duct.f0 / (N - 1)

    def snapshot(term: Termination) -> Solution:
        case = reflection_case
        if "B0" not in points:
            case = "undetermined: vacuum" if interfaces else "undetermined: x_max"
        return Solution(regions, lattice.plus, lattice.minus, interfaces, term, points, model, inlet, N_h, case)

    try:
        while termination is None:
            outcome = {}
            for side, dl, sign in ((LOWER, lower_data, "-"), (UPPER, upper_data, "+")):
                if dl is None or len(dl.nodes) < 2:
                    outcome[side] = None
                    continue
                res = solve_wall_region(dl, side, model, lattice, f"S{level}{sign}", level)
                regions.append(res.region)
                if res.interface is not None:
                    interfaces.append(res.interface)
                    points[f"V{sign}"] = (res.interface.x, res.interface.y)
                if res.status == "wall":
                    key = ("B" if side == LOWER else "D") + str(level)
                    points[key] = (res.closing[-1].x, res.closing[-1].y)
                outcome[side] = res
            low, up = outcome[LOWER], outcome[UPPER]
            if level == 0 and low is not None and low.status == "no_wall":
                raise CaseTwoDetected("the C- characteristic through P does not reach the lower wall")
            if strips:
                termination = Termination(NON_INTERSECTION, "boundary characteristics of the last interaction "
                                          "region do not meet; final wall strips marched")
                break
            statuses = {o.status for o in (low, up) if o is not None}
            if len(regions) >= cfg.max_regions:
                termination = Termination(MAX_REGIONS, f"region cap {cfg.max_regions} reached")
                break
            if low is None or up is None or len(low.closing) < 2 or len(up.closing) < 2:
                termination = _final_case(statuses, "no interaction data left")
                break
            level += 1
            g = solve_goursat(low.closing, up.closing, model, lattice, f"S{level}", level)
            regions.append(g.region)
            if g.corner is not None:
                points[f"P{level}"] = (g.corner.x, g.corner.y)
            if statuses != {"wall"}:
                termination = _final_case(statuses, "walls not reached by the characteristics through the corner")
                break
            if len(regions) >= cfg.max_regions:
                termination = Termination(MAX_REGIONS, f"region cap {cfg.max_regions} reached")
                break
            if g.reason == X_MAX:
                termination = Termination(X_MAX, f"interaction region S{level} truncated at x_max")
                break
            if g.reason == NON_INTERSECTION:
                strips = True
            lower_data = DataLine(g.next_lower, model) if len(g.next_lower) >= 2 else None
            upper_data = DataLine(g.next_upper, model) if len(g.next_upper) >= 2 else None
            if strips and lower_data is None and upper_data is None:
                termination = Termination(NON_INTERSECTION, "boundary characteristics do not meet")
    except DuctMocError as exc:
        # keep what was built so callers can still export it
        exc.partial = snapshot(Termination(FAILED, str(exc)))
        raise
    return snapshot(termination)


def _final_case(statuses: set[str], detail: str) -> Termination:
    if "vacuum" in statuses:
        return Termination(VACUUM_CASE, "vacuum interfaces truncate the wall families")
    if "no_wall" in statuses:
        return Termination(OPEN_WALLS, detail)
    if "x_max" in statuses:
        return Termination(X_MAX, "x_max reached")
    return Termination(X_MAX, detail)
