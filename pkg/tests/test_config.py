import pytest

from ductmoc.config import SCHEMA, RunConfig, format_config, load_config, parse_config
from ductmoc.errors import InvalidParameter


def test_defaults_and_comments():
    cfg = parse_config("# comment\n\nu0 = 3.0  # trailing\nN = 33\nstations = 0.5, 1.5\n")
    assert cfg.u0 == 3.0 and cfg.N == 33 and cfg.stations == [0.5, 1.5]
    assert cfg.gamma == 1.4
    assert cfg.entropy == pytest.approx(1.0 / 1.4)


def test_round_trip():
    cfg = parse_config("inflow = perturbed\neps = 0.01\nx_max = 8\noutputs = nodes, net\nmax_wall_turn = 0.01\n")
    again = parse_config(format_config(cfg))
    assert again == cfg
    assert set(SCHEMA) >= {"gamma", "N", "outputs"}


@pytest.mark.parametrize(
    "text",
    [
        "gamma = 0.9",
        "gama = 1.4",
        "N = 2",
        "N = 3.5",
        "u0 = -1",
        "u0 = nan",
        "inflow = swirl",
        "u0 = 2\nu0 = 3",
        "just words",
        "outputs = nodes, pictures",
        "inflow = table",
        "stations = 1, x",
        "k = 0",
    ],
)
def test_invalid_configs(text):
    with pytest.raises(InvalidParameter):
        parse_config(text)


def test_paths_resolve_against_the_config_file(tmp_path):
    p = tmp_path / "sub" / "run.cfg"
    p.parent.mkdir()
    p.write_text("out = results\n", encoding="utf-8")
    cfg = load_config(p)
    assert cfg.resolve_path(cfg.out) == p.parent / "results"
    assert RunConfig().resolve_path("x") .name == "x"


def test_model_construction():
    cfg = parse_config("inflow = perturbed\neps = 0.02\nk = 0.3\nN = 9\nx_max = 4\n")
    assert not cfg.profile().uniform
    assert cfg.geometry().f_prime_inf == 0.3
    assert cfg.solver().x_max == 4.0
    assert cfg.gas().gamma == 1.4
