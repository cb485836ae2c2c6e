"""
Command-line entry point.

    ductmoc solve CONFIG [--out DIR] [--quiet]
    ductmoc diagnose CONFIG [--out DIR] [--quiet]
    ductmoc sweep 'GLOB' [--out DIR] [--quiet] [--jobs N]

Exit codes: 0 success, 2 invalid input, 3 the cross characteristic misses
the opposite wall, 4 numerical failure (partial artifacts are still written).
"""
from __future__ import annotations

import argparse
import glob
import logging
import sys
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .config import RunConfig, load_config
from .diagnostics import DiagnosticsReport, convergence_order, default_stations, diagnose
from .duct_geometry import validate
from .errors import CaseTwoDetected, DuctMocError, InvalidParameter
from .export import export_mesh
from .inflow import check_profile
from .region_builder import Solution, orchestrate
from .render import render_net

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_CASE_TWO = 3
EXIT_NUMERICAL = 4

log = logging.getLogger("ductmoc")


def _validate_inputs(cfg: RunConfig):
    gas = cfg.gas()
    profile = cfg.profile()
    duct = cfg.geometry()
    report = validate(duct)
    if not report.ok:
        raise InvalidParameter(f"duct geometry rejected:\n{report}")
    if abs(profile.f0 - duct.f0) > 1e-12 * max(1.0, duct.f0):
        raise InvalidParameter(f"inflow half-width {profile.f0} does not match the duct f(0)={duct.f0}")
    check_profile(profile, gas)
    return gas, profile, duct


def _write_artifacts(sol: Solution, cfg: RunConfig, out: Path, report: DiagnosticsReport | None) -> list[Path]:
    written = []
    if "nodes" in cfg.outputs or "regions" in cfg.outputs:
        files = export_mesh(sol, out)
        written += [f for f in files if f.stem in cfg.outputs]
        for f in files:
            if f.stem not in cfg.outputs:
                f.unlink()
    if "diagnostics" in cfg.outputs and report is not None:
        p = out / "diagnostics.txt"
        p.write_text(report.to_text(), encoding="utf-8")
        written.append(p)
    if "net" in cfg.outputs:
        written.append(render_net(sol, out / "net.svg"))
    return written


def run(config_path: str | Path, out: str | Path | None = None, mode: str = "solve") -> int:
    """validate -> solve -> diagnose -> export; returns the exit code.

    ``error.log`` is always written to the output directory.
    """
    config_path = Path(config_path)
    out_dir = Path(out) if out is not None else None
    messages: list[str] = []
    code = EXIT_OK
    sol: Solution | None = None
    report: DiagnosticsReport | None = None
    cfg: RunConfig | None = None
    try:
        cfg = load_config(config_path)
        if out_dir is None:
            out_dir = cfg.resolve_path(cfg.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        gas, profile, duct = _validate_inputs(cfg)
        t0 = time.perf_counter()
        sol = orchestrate(profile, duct, cfg.solver(), cfg.N, gas)
        log.info("solved %d nodes in %d regions (%.2f s), termination: %s",
                 len(sol.nodes), len(sol.regions), time.perf_counter() - t0, sol.termination.case)
        stations = cfg.stations if cfg.stations is not None else default_stations(sol)
        report = diagnose(sol, stations)
        if mode == "diagnose" and profile.uniform:
            ladder = sorted({max(5, (cfg.N - 1) // 4 + 1), max(9, (cfg.N - 1) // 2 + 1), cfg.N})
            if len(ladder) >= 3:
                report.extend(convergence_order(profile, duct, cfg.solver(), ladder, gas))
        if mode == "diagnose" and log.isEnabledFor(logging.INFO):
            sys.stdout.write(report.to_text())
        messages.append(f"ok: termination={sol.termination.case} nodes={len(sol.nodes)}")
    except OSError as exc:
        code = EXIT_INVALID
        messages.append(f"cannot read input: {exc}")
    except CaseTwoDetected as exc:
        code = EXIT_CASE_TWO
        sol = getattr(exc, "partial", None)
        messages.append(f"case (ii): {exc}")
    except DuctMocError as exc:
        # value-type errors are bad input; kernel and region failures are numerical
        if isinstance(exc, ValueError):
            code = EXIT_INVALID
            messages.append(f"invalid input: {exc}")
        else:
            code = EXIT_NUMERICAL
            sol = getattr(exc, "partial", None)
            messages.append(f"numerical failure: {exc}")
            messages.append(traceback.format_exc())
    except (ArithmeticError, ValueError) as exc:
        code = EXIT_NUMERICAL
        messages.append(f"numerical failure: {exc!r}")
        messages.append(traceback.format_exc())
    if out_dir is None:
        out_dir = Path("out")
    out_dir.mkdir(parents=True, exist_ok=True)
    if sol is not None and cfg is not None:
        try:
            for p in _write_artifacts(sol, cfg, out_dir, report):
                log.info("wrote %s", p)
        except OSError as exc:
            code = code or EXIT_INVALID
            messages.append(f"could not write artifacts to {out_dir}: {exc}")
    (out_dir / "error.log").write_text("\n".join(messages) + "\n", encoding="utf-8")
    for m in messages:
        if code != EXIT_OK:
            log.error("%s", m)
    return code


def _sweep_one(args: tuple[str, str]) -> tuple[str, int]:
    cfg_path, out = args
    logging.getLogger("ductmoc").setLevel(logging.WARNING)
    return cfg_path, run(cfg_path, out)


def sweep(pattern: str, out: str | Path, jobs: int | None = None) -> int:
    """Run every matching config in its own process and output directory."""
    paths = sorted(glob.glob(pattern))
    if not paths:
        log.error("no config matches %s", pattern)
        return EXIT_INVALID
    out = Path(out)
    tasks = [(p, str(out / Path(p).stem)) for p in paths]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        results = list(pool.map(_sweep_one, tasks))
    worst = EXIT_OK
    for path, code in results:
        log.info("%s -> exit %d", path, code)
        worst = max(worst, code)
    return worst


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ductmoc", description="Characteristics solver for supersonic "
                                     "flow in a symmetric divergent duct.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (("solve", "solve one configuration"),
                           ("diagnose", "solve and print the verification report"),
                           ("sweep", "solve every configuration matching a glob")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("config", help="config file" if name != "sweep" else "glob of config files")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("-q", "--quiet", action="store_true", help="only report errors")
        if name == "sweep":
            p.add_argument("--jobs", type=int, default=None, help="parallel processes")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(format="%(message)s", stream=sys.stderr)
    log.setLevel(logging.ERROR if args.quiet else logging.INFO)
    if args.command == "sweep":
        return sweep(args.config, args.out or "out", args.jobs)
    return run(args.config, args.out, args.command)


if __name__ == "__main__":
    sys.exit(main())
