"""Shared configurations and cached solver runs."""
from __future__ import annotations

import functools
import time

import pytest

from ductmoc.config import RunConfig
from ductmoc.region_builder import orchestrate

# uniform Mach-2 inflow, gently divergent duct
MACH2 = dict(gamma=1.4, inflow="uniform", u0=2.0, rho0=1.0, c0=1.0, f0=1.0, k=0.05, L=1.0)
# uniform Mach-10 inflow, wall steep enough to separate the gas
MACH10 = dict(gamma=1.4, inflow="uniform", u0=10.0, rho0=1.0, c0=1.0, f0=1.0, k=0.7, L=1.0)
# symmetric cosine perturbation of the Mach-2 inflow
PERTURBED = dict(MACH2, inflow="perturbed", eps=0.01, shape="cosine")

CASES = {"mach2": MACH2, "mach10": MACH10, "perturbed": PERTURBED}


def make_config(case: str, **overrides) -> RunConfig:
    return RunConfig(**{**CASES[case], **overrides})


@functools.lru_cache(maxsize=None)
def _timed_solve(case: str, N: int, x_max: float, max_regions: int):
    cfg = make_config(case, N=N, x_max=x_max, max_regions=max_regions)
    t0 = time.perf_counter()
    sol = orchestrate(cfg.profile(), cfg.geometry(), cfg.solver(), cfg.N, cfg.gas())
    return sol, time.perf_counter() - t0


def timed_solve(case: str, N: int, x_max: float = 30.0, max_regions: int = 64):
    """Solve once per argument set for the whole session; returns (solution, seconds)."""
    return _timed_solve(case, N, x_max, max_regions)


def solve(case: str, N: int, x_max: float = 30.0, max_regions: int = 64):
    return timed_solve(case, N, x_max, max_regions)[0]


@pytest.fixture(scope="session")
def mach2_small():
    return solve("mach2", 17, x_max=6.0)


@pytest.fixture(scope="session")
def perturbed_small():
    return solve("perturbed", 17, x_max=4.0)


@pytest.fixture(scope="session")
def mach10_small():
    return solve("mach10", 17)


# acceptance summary: one line per criterion, printed after the run
_SUMMARY: dict[int, str] = {}


def record(criterion: int, ok: bool, detail: str) -> str:
    line = f"{'PASS' if ok else 'FAIL'} criterion {criterion}: {detail}"
    _SUMMARY[criterion] = line
    print(line)
    return line


def pytest_terminal_summary(terminalreporter):
    if _SUMMARY:
        terminalreporter.section("acceptance criteria")
        for k in sorted(_SUMMARY):
            terminalreporter.write_line(_SUMMARY[k])
