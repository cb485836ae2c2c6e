"""Mesh table and region summary files."""
from __future__ import annotations

import csv
from pathlib import Path

from .errors import InvalidParameter
from .region_builder import Solution

NODE_COLUMNS = ("region", "kind", "i", "j", "x", "y", "u", "v", "rho", "s", "c", "A", "sigma", "Ehat",
                "omega_over_rho", "delta2")
_FLOAT_COLUMNS = NODE_COLUMNS[4:]


def _fmt(v: float) -> str:
    # repr round-trips doubles exactly and ignores the locale
    return repr(float(v))


def node_rows(sol: Solution):
    for region in sol.regions:
        for n in region.nodes:
            yield (region.name, n.kind, str(n.i), str(n.j),
                   *(_fmt(v) for v in (n.x, n.y, n.u, n.v, n.rho, n.s, n.c, n.A, n.sigma, n.E_hat,
                                       n.omega_over_rho, n.delta2)))


def write_nodes(sol: Solution, path: str | Path) -> Path:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(NODE_COLUMNS)
        w.writerows(node_rows(sol))
    return path


def read_nodes(path: str | Path) -> list[dict]:
    """Re-import ``nodes.csv``; numeric fields come back bit-identical."""
    path = Path(path)
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != NODE_COLUMNS:
            raise InvalidParameter(f"{path}: unexpected header {reader.fieldnames}")
        rows = []
        for r in reader:
            row = {"region": r["region"], "kind": r["kind"], "i": int(r["i"]), "j": int(r["j"])}
            row.update({k: float(r[k]) for k in _FLOAT_COLUMNS})
            rows.append(row)
    return rows


def regions_text(sol: Solution) -> str:
    out = [f"termination case={sol.termination.case} detail=\"{sol.termination.detail}\"",
           f"reflection_case {sol.reflection_case}",
           f"inlet_spacing h={_fmt(sol.h)}",
           f"nodes total={len(sol.nodes)}"]
    for r in sol.regions:
        out.append(f"region name={r.name} kind={r.kind} level={r.index} nodes={len(r.nodes)}")
        for note in r.notes:
            out.append(f"  note {note}")
    for name, (x, y) in sol.points.items():
        out.append(f"junction name={name} x={_fmt(x)} y={_fmt(y)}")
    for vi in sol.vacuum_interfaces:
        out.append(f"vacuum_interface side={vi.side} anchor_x={_fmt(vi.x)} anchor_y={_fmt(vi.y)} "
                   f"slope={_fmt(vi.slope)}")
    return "\n".join(out) + "\n"


def write_regions(sol: Solution, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(regions_text(sol), encoding="utf-8")
    return path


def export_mesh(sol: Solution, directory: str | Path) -> list[Path]:
    """Write ``nodes.csv`` and ``regions.txt`` into ``directory``."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    return [write_nodes(sol, d / "nodes.csv"), write_regions(sol, d / "regions.txt")]
