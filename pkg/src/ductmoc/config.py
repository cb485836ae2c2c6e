"""
Run configuration: a flat ``key = value`` text file.

Blank lines and ``#`` comments are ignored.  Keys and their defaults are
listed in :data:`SCHEMA`; unknown keys are rejected so typos surface early.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

from .duct_geometry import DuctGeometry, hyperbolic_wall, load_wall_table
from .errors import InvalidParameter
from .gas_state import GasConstants
from .inflow import SHAPES, InletProfile, load_inlet_table, perturbed_profile, uniform_profile
from .moc_kernel import SolverConfig

ARTIFACTS = ("nodes", "regions", "diagnostics", "net")

# key -> (type, default, help)
SCHEMA: dict[str, tuple[type, object, str]] = {
    "gamma": (float, 1.4, "adiabatic exponent, > 1"),
    "inflow": (str, "uniform", "uniform | perturbed | table"),
    "u0": (float, 2.0, "axis inflow speed"),
    "rho0": (float, 1.0, "axis inflow density"),
    "s0": (float, None, "axis inflow entropy; defaults to c0^2 / (gamma rho0^(gamma-1))"),
    "c0": (float, 1.0, "axis sound speed, used only when s0 is absent"),
    "eps": (float, 0.0, "perturbation amplitude (perturbed inflow)"),
    "shape": (str, "cosine", "perturbation shape: " + " | ".join(SHAPES)),
    "inflow_file": (str, None, "CSV with columns y,u,rho,s (table inflow)"),
    "duct": (str, "hyperbolic", "hyperbolic | table"),
    "f0": (float, 1.0, "duct half-width at the inlet"),
    "k": (float, 0.05, "asymptotic wall slope (hyperbolic duct)"),
    "L": (float, 1.0, "wall curvature length (hyperbolic duct)"),
    "duct_file": (str, None, "CSV with columns x,f (table duct)"),
    "N": (int, 65, "inlet nodes, >= 3"),
    "x_max": (float, 30.0, "downstream truncation"),
    "c_vac": (float, None, "vacuum cutoff on the sound speed; default 1e-4 c0"),
    "corrector_tol": (float, 1e-12, "predictor-corrector tolerance"),
    "max_iters": (int, 20, "corrector passes per node"),
    "max_regions": (int, 64, "cap on the number of regions"),
    "dx_guard": (float, None, "horizon for the non-intersection test; default 10 f0"),
    "max_wall_turn": (float, None, "largest flow turn between wall nodes; default 2/(N-1)"),
    "stations": (str, None, "comma-separated flux-audit abscissae; default automatic"),
    "outputs": (str, ",".join(ARTIFACTS), "artifacts to write: " + ", ".join(ARTIFACTS)),
    "out": (str, "out", "output directory"),
}


@dataclass
class RunConfig:
    gamma: float = 1.4
    inflow: str = "uniform"
    u0: float = 2.0
    rho0: float = 1.0
    s0: float | None = None
    c0: float = 1.0
    eps: float = 0.0
    shape: str = "cosine"
    inflow_file: str | None = None
    duct: str = "hyperbolic"
    f0: float = 1.0
    k: float = 0.05
    L: float = 1.0
    duct_file: str | None = None
    N: int = 65
    x_max: float = 30.0
    c_vac: float | None = None
    corrector_tol: float = 1e-12
    max_iters: int = 20
    max_regions: int = 64
    dx_guard: float | None = None
    max_wall_turn: float | None = None
    stations: list[float] | None = None
    outputs: tuple[str, ...] = ARTIFACTS
    out: str = "out"
    source: Path | None = field(default=None, compare=False)

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if not self.gamma > 1.0:
            raise InvalidParameter(f"gamma must exceed 1 for a polytropic gas (got {self.gamma})")
        if self.inflow not in ("uniform", "perturbed", "table"):
            raise InvalidParameter(f"inflow must be uniform, perturbed or table (got '{self.inflow}')")
        if self.duct not in ("hyperbolic", "table"):
            raise InvalidParameter(f"duct must be hyperbolic or table (got '{self.duct}')")
        positive = ["u0", "rho0", "c0", "f0", "x_max", "corrector_tol"]
        if self.duct == "hyperbolic":
            positive += ["k", "L"]
        for name in positive:
            val = getattr(self, name)
            if not (isinstance(val, (int, float)) and math.isfinite(val) and val > 0.0):
                raise InvalidParameter(f"{name} must be positive and finite (got {val})")
        for name in ("s0", "c_vac", "dx_guard", "max_wall_turn"):
            val = getattr(self, name)
            if val is not None and not val > 0.0:
                raise InvalidParameter(f"{name} must be positive (got {val})")
        if self.N < 3:
            raise InvalidParameter(f"N must be at least 3 (got {self.N})")
        if self.max_iters < 1 or self.max_regions < 1:
            raise InvalidParameter("max_iters and max_regions must be at least 1")
        if self.inflow == "perturbed" and self.shape not in SHAPES:
            raise InvalidParameter(f"shape must be one of {SHAPES} (got '{self.shape}')")
        if self.inflow == "table" and not self.inflow_file:
            raise InvalidParameter("table inflow needs inflow_file")
        if self.duct == "table" and not self.duct_file:
            raise InvalidParameter("table duct needs duct_file")
        unknown = set(self.outputs) - set(ARTIFACTS)
        if unknown:
            raise InvalidParameter(f"unknown outputs {sorted(unknown)} (expected some of {ARTIFACTS})")

    # --- model construction -------------------------------------------------

    @property
    def entropy(self) -> float:
        if self.s0 is not None:
            return self.s0
        return self.c0 * self.c0 / (self.gamma * self.rho0 ** (self.gamma - 1.0))

    def gas(self) -> GasConstants:
        return GasConstants(self.gamma)

    def profile(self) -> InletProfile:
        if self.inflow == "uniform":
            return uniform_profile(self.u0, self.rho0, self.entropy, self.f0)
        if self.inflow == "perturbed":
            return perturbed_profile(self.u0, self.rho0, self.entropy, self.eps, self.shape, self.f0, self.gamma)
        return load_inlet_table(self.resolve_path(self.inflow_file))

    def geometry(self) -> DuctGeometry:
        if self.duct == "hyperbolic":
            return hyperbolic_wall(self.f0, self.k, self.L)
        return load_wall_table(self.resolve_path(self.duct_file))

    def solver(self) -> SolverConfig:
        return SolverConfig(
            x_max=self.x_max,
            c_vac=self.c_vac,
            corrector_tol=self.corrector_tol,
            max_iters=self.max_iters,
            max_regions=self.max_regions,
            dx_guard=self.dx_guard,
            max_wall_turn=self.max_wall_turn,
        )

    def resolve_path(self, name: str) -> Path:
        p = Path(name)
        if not p.is_absolute() and self.source is not None:
            p = self.source.parent / p
        return p


def _convert(key: str, raw: str):
    kind, _, _ = SCHEMA[key]
    if raw.lower() in ("", "none", "default"):
        return None
    if key == "stations":
        try:
            return [float(t) for t in raw.split(",") if t.strip()]
        except ValueError as exc:
            raise InvalidParameter(f"stations: expected comma-separated numbers (got '{raw}')") from exc
    if key == "outputs":
        return tuple(t.strip() for t in raw.split(",") if t.strip())
    try:
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
    except ValueError as exc:
        raise InvalidParameter(f"{key}: expected {kind.__name__} (got '{raw}')") from exc
    return raw


def parse_config(text: str, source: Path | None = None) -> RunConfig:
    """Parse ``key = value`` lines into a validated RunConfig."""
    values: dict[str, object] = {}
    where = source.name if source else "<config>"
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidParameter(f"{where}:{lineno}: expected 'key = value'")
        key, raw = (t.strip() for t in line.split("=", 1))
        if key not in SCHEMA:
            raise InvalidParameter(f"{where}:{lineno}: unknown key '{key}'")
        if key in values:
            raise InvalidParameter(f"{where}:{lineno}: duplicate key '{key}'")
        val = _convert(key, raw)
        if val is not None:
            values[key] = val
    return RunConfig(**values, source=source)


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    return parse_config(path.read_text(encoding="utf-8"), path)


def format_config(cfg: RunConfig) -> str:
    """Inverse of :func:`parse_config` (defaults included)."""
    lines = []
    for key in SCHEMA:
        val = getattr(cfg, key)
        if val is None:
            continue
        if key == "stations":
            val = ", ".join(repr(v) for v in val)
        elif key == "outputs":
            val = ", ".join(val)
        elif isinstance(val, float):
            val = repr(val)
        lines.append(f"{key} = {val}")
    return "\n".join(lines) + "\n"
