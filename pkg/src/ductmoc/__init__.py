"""Method-of-characteristics solver for steady supersonic flow in a symmetric divergent duct."""
from .duct_geometry import DuctGeometry, hyperbolic_wall, load_wall_table, tabulated_wall
from .errors import (
    CaseTwoDetected,
    DuctMocError,
    InvalidParameter,
    KernelError,
    NonPhysical,
    NonSupersonic,
    VacuumReached,
)
from .gas_state import FlowState, GasConstants, derive, state_from
from .inflow import InletProfile, load_inlet_table, perturbed_profile, uniform_profile
from .moc_kernel import SolverConfig
from .region_builder import Solution, orchestrate
from .simple_wave import build_fan, fan_state

__all__ = [
    "CaseTwoDetected",
    "DuctGeometry",
    "DuctMocError",
    "FlowState",
    "GasConstants",
    "InletProfile",
    "InvalidParameter",
    "KernelError",
    "NonPhysical",
    "NonSupersonic",
    "Solution",
    "SolverConfig",
    "VacuumReached",
    "build_fan",
    "derive",
    "fan_state",
    "hyperbolic_wall",
    "load_inlet_table",
    "load_wall_table",
    "orchestrate",
    "perturbed_profile",
    "state_from",
    "tabulated_wall",
    "uniform_profile",
]
