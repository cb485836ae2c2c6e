import pytest

from ductmoc import cli, region_builder
from ductmoc.errors import CorrectorDiverged

SMALL = "N = 9\nx_max = 3.0\n"


def write(tmp_path, text, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def test_solve_writes_all_artifacts(tmp_path):
    cfg = write(tmp_path, SMALL)
    assert cli.main(["solve", str(cfg), "--out", str(tmp_path / "o"), "-q"]) == cli.EXIT_OK
    names = sorted(p.name for p in (tmp_path / "o").iterdir())
    assert names == ["diagnostics.txt", "error.log", "net.svg", "nodes.csv", "regions.txt"]


def test_outputs_selection(tmp_path):
    cfg = write(tmp_path, SMALL + "outputs = nodes\n")
    assert cli.run(cfg, tmp_path / "o") == 0
    assert sorted(p.name for p in (tmp_path / "o").iterdir()) == ["error.log", "nodes.csv"]


def test_identical_configs_give_identical_bytes(tmp_path):
    cfg = write(tmp_path, SMALL + "inflow = perturbed\neps = 0.01\n")
    cli.run(cfg, tmp_path / "a")
    cli.run(cfg, tmp_path / "b")
    assert (tmp_path / "a" / "nodes.csv").read_bytes() == (tmp_path / "b" / "nodes.csv").read_bytes()


@pytest.mark.parametrize("text", ["gamma = 0.9\n", "gama = 1.4\n", "u0 = 0.5\n", "duct = table\nduct_file = wall.csv\n"])
def test_invalid_input_exit_code(tmp_path, text):
    # a straight wall violates the convexity requirement
    write(tmp_path, "x,f\n0,1\n1,1.1\n2,1.2\n", "wall.csv")
    cfg = write(tmp_path, text)
    out = tmp_path / "o"
    assert cli.run(cfg, out) == cli.EXIT_INVALID
    assert "invalid input" in (out / "error.log").read_text(encoding="utf-8")


def test_missing_config(tmp_path):
    assert cli.run(tmp_path / "nope.cfg", tmp_path / "o") == cli.EXIT_INVALID
    assert (tmp_path / "o" / "error.log").exists()


def test_case_two_exit_code(tmp_path, monkeypatch):
    real = region_builder.solve_wall_region

    def no_lower_wall(data, side, *args, **kw):
        out = real(data, side, *args, **kw)
        if side == "lower":
            out.status = "no_wall"
        return out

    monkeypatch.setattr(region_builder, "solve_wall_region", no_lower_wall)
    cfg = write(tmp_path, SMALL)
    assert cli.run(cfg, tmp_path / "o") == cli.EXIT_CASE_TWO
    # the partial solution is still exported
    assert (tmp_path / "o" / "nodes.csv").exists()


def test_numerical_failure_exit_code(tmp_path, monkeypatch):
    def boom(*args, **kw):
        raise CorrectorDiverged("synthetic divergence")

    monkeypatch.setattr(region_builder, "solve_goursat", boom)
    cfg = write(tmp_path, SMALL)
    assert cli.run(cfg, tmp_path / "o") == cli.EXIT_NUMERICAL
    log = (tmp_path / "o" / "error.log").read_text(encoding="utf-8")
    assert "synthetic divergence" in log and "Traceback" in log
    assert "termination case=failed" in (tmp_path / "o" / "regions.txt").read_text(encoding="utf-8")


def test_diagnose_prints_report(tmp_path, capsys):
    cfg = write(tmp_path, "N = 17\nx_max = 3.0\n")
    assert cli.main(["diagnose", str(cfg), "--out", str(tmp_path / "o")]) == 0
    out = capsys.readouterr().out
    assert "simple-wave oracle" in out and "wall-hit abscissa" in out


def test_sweep(tmp_path):
    write(tmp_path, SMALL, "a.cfg")
    write(tmp_path, "gamma = 0.5\n", "b.cfg")
    code = cli.main(["sweep", str(tmp_path / "*.cfg"), "--out", str(tmp_path / "runs"), "--jobs", "2", "-q"])
    assert code == cli.EXIT_INVALID
    assert (tmp_path / "runs" / "a" / "nodes.csv").exists()
    assert (tmp_path / "runs" / "b" / "error.log").exists()
    assert cli.main(["sweep", str(tmp_path / "none*.cfg"), "-q"]) == cli.EXIT_INVALID
