"""Symmetric divergent duct: walls y = -f(x) (lower) and y = f(x) (upper)."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
from scipy.interpolate import PchipInterpolator

from .errors import InvalidParameter, OutOfDomain

LOWER = "lower"
UPPER = "upper"
SIDES = (LOWER, UPPER)


@dataclass(frozen=True)
class DuctGeometry:
    f: Callable[[float], float]
    f_prime: Callable[[float], float]
    f_second: Callable[[float], float]
    f_prime_inf: float
    x_max: float = math.inf
    # set for tabulated walls, whose asymptotic slope is only an estimate
    tabulated: bool = False
    label: str = "custom"

    @property
    def f0(self) -> float:
        return self.f(0.0)

    def wall_y(self, x: float, side: str) -> float:
        return -self.f(x) if side == LOWER else self.f(x)


@dataclass
class ValidationReport:
    violations: list[tuple[str, float]] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        lines = [f"violation: {what} at x={x!r}" for what, x in self.violations]
        lines += [f"note: {n}" for n in self.notes]
        return "\n".join(lines) if lines else "valid"


def validate(duct: DuctGeometry, n_samples: int = 2001) -> ValidationReport:
    """Check positivity, flat start, strict convexity and a bounded slope limit.

    Violations are returned as data; nothing is raised.
    """
    if n_samples < 2:
        raise InvalidParameter("n_samples must be at least 2")
    report = ValidationReport()
    x_end = duct.x_max if math.isfinite(duct.x_max) else 100.0 * max(duct.f0, 1.0)
    xs = np.linspace(0.0, x_end, n_samples)
    f0 = duct.f(0.0)
    if not f0 > 0.0:
        report.violations.append(("f(0) > 0", 0.0))
    if abs(duct.f_prime(0.0)) > 1e-12:
        report.violations.append(("f'(0) = 0", 0.0))
    slopes = [duct.f_prime(x) for x in xs]
    for x in xs:
        if not duct.f_second(x) > 0.0:
            report.violations.append(("f''(x) > 0", float(x)))
            break
    for a, b, x in zip(slopes, slopes[1:], xs[1:]):
        if b < a:
            report.violations.append(("f' increasing", float(x)))
            break
    lim = duct.f_prime_inf
    if not math.isfinite(lim):
        report.violations.append(("finite limit of f' as x -> infinity", x_end))
    else:
        for s, x in zip(slopes, xs):
            if s > lim * (1.0 + 1e-12) + 1e-14:
                report.violations.append(("f' bounded by its limit", float(x)))
                break
    if duct.tabulated:
        report.notes.append("asymptotic slope taken from the last table sample")
    return report


def hyperbolic_wall(f0: float, k: float, L: float, x_max: float = math.inf) -> DuctGeometry:
    """Wall f(x) = f0 + k (sqrt(L^2 + x^2) - L), asymptotic slope k."""
    for name, val in (("f0", f0), ("k", k), ("L", L), ("x_max", x_max)):
        if not val > 0.0:
            raise InvalidParameter(f"{name} must be positive (got {val})")

    def f(x: float) -> float:
        return f0 + k * (math.sqrt(L * L + x * x) - L)

    def fp(x: float) -> float:
        return k * x / math.sqrt(L * L + x * x)

    def fpp(x: float) -> float:
        return k * L * L / (L * L + x * x) ** 1.5

    return DuctGeometry(f, fp, fpp, k, x_max, label=f"hyperbolic(f0={f0!r}, k={k!r}, L={L!r})")


def tabulated_wall(xs, fs, x_max: float | None = None) -> DuctGeometry:
    """Wall from samples, interpolated by a shape-preserving piecewise cubic."""
    xs = np.asarray(xs, dtype=float)
    fs = np.asarray(fs, dtype=float)
    if xs.ndim != 1 or xs.shape != fs.shape or xs.size < 3:
        raise InvalidParameter("wall table needs at least three (x, f) samples")
    if np.any(np.diff(xs) <= 0.0):
        raise InvalidParameter("wall table x values must be strictly increasing")
    if xs[0] != 0.0:
        raise InvalidParameter("wall table must start at x = 0")
    interp = PchipInterpolator(xs, fs, extrapolate=False)
    d1 = interp.derivative(1)
    d2 = interp.derivative(2)
    x_last = float(xs[-1])
    if x_max is None or x_max > x_last:
        x_max = x_last

    def clip(x: float) -> float:
        if x < 0.0:
            raise OutOfDomain(f"wall evaluated at x={x} < 0")
        return min(x, x_last)

    return DuctGeometry(
        f=lambda x: float(interp(clip(x))),
        f_prime=lambda x: float(d1(clip(x))),
        f_second=lambda x: float(d2(clip(x))),
        f_prime_inf=float(d1(x_last)),
        x_max=x_max,
        tabulated=True,
        label="table",
    )


def load_wall_table(path: str | Path, x_max: float | None = None) -> DuctGeometry:
    """Read a UTF-8 CSV with header ``x,f``."""
    path = Path(path)
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [h.strip() for h in reader.fieldnames] != ["x", "f"]:
            raise InvalidParameter(f"{path}: expected header 'x,f'")
        try:
            rows = [(float(r["x"]), float(r["f"])) for r in reader]
        except (TypeError, ValueError) as exc:
            raise InvalidParameter(f"{path}: non-numeric entry ({exc})") from exc
    xs, fs = zip(*rows) if rows else ((), ())
    return tabulated_wall(xs, fs, x_max)


def slip_angle(duct: DuctGeometry, x: float, side: str) -> float:
    """Flow angle imposed by tangency on the given wall."""
    if x < 0.0:
        raise OutOfDomain(f"wall evaluated at x={x} < 0")
    t = math.atan(duct.f_prime(x))
    return -t if side == LOWER else t


def wall_normal(duct: DuctGeometry, x: float, side: str) -> tuple[float, float]:
    """Unit normal pointing into the duct."""
    if x < 0.0:
        raise OutOfDomain(f"wall evaluated at x={x} < 0")
    fp = duct.f_prime(x)
    n = math.hypot(fp, 1.0)
    return (fp / n, 1.0 / n) if side == LOWER else (fp / n, -1.0 / n)
