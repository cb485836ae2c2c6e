import math

import numpy as np
import pytest

from ductmoc.duct_geometry import (
    LOWER,
    UPPER,
    DuctGeometry,
    hyperbolic_wall,
    load_wall_table,
    slip_angle,
    tabulated_wall,
    validate,
    wall_normal,
)
from ductmoc.errors import InvalidParameter, OutOfDomain


def test_hyperbolic_wall_values():
    d = hyperbolic_wall(1.0, 0.05, 1.0)
    assert d.f0 == 1.0
    assert d.f(3.0) == pytest.approx(1.0 + 0.05 * (math.sqrt(10.0) - 1.0), rel=1e-15)
    assert d.f_prime(0.0) == 0.0
    assert d.f_prime(1e8) == pytest.approx(0.05, rel=1e-12)
    assert d.f_prime_inf == 0.05
    for x in (0.0, 0.7, 4.0):
        h = 1e-5
        assert d.f_prime(x) == pytest.approx((d.f(x + h) - d.f(x - h)) / (2 * h), rel=1e-8, abs=1e-12)
        assert d.f_second(x) == pytest.approx((d.f_prime(x + h) - d.f_prime(x - h)) / (2 * h), rel=1e-7)


def test_vacuum_onset_slope_location():
    # f'(x) = 0.5347989303 is reached at x = 1.18409345367590 on the k=0.7 wall
    d = hyperbolic_wall(1.0, 0.7, 1.0)
    assert d.f_prime(1.1840934536759051) == pytest.approx(0.53479893031518026, rel=1e-14)


@pytest.mark.parametrize("args", [(0.0, 0.05, 1.0), (1.0, -0.1, 1.0), (1.0, 0.05, 0.0)])
def test_hyperbolic_rejects_bad_parameters(args):
    with pytest.raises(InvalidParameter):
        hyperbolic_wall(*args)


def test_validate_accepts_hyperbolic():
    rep = validate(hyperbolic_wall(1.0, 0.05, 1.0))
    assert rep.ok
    assert str(rep) == "valid"


def test_validate_reports_violations_without_raising():
    straight = DuctGeometry(lambda x: 1.0 + 0.1 * x, lambda x: 0.1, lambda x: 0.0, 0.1)
    rep = validate(straight)
    names = [v[0] for v in rep.violations]
    assert "f'(0) = 0" in names
    assert "f''(x) > 0" in names
    assert not rep.ok
    concave = DuctGeometry(lambda x: 1.0 - x * x, lambda x: -2 * x, lambda x: -2.0, 0.0)
    assert not validate(concave).ok
    unbounded = DuctGeometry(lambda x: 1.0 + x * x, lambda x: 2 * x, lambda x: 2.0, math.inf)
    assert ("finite limit of f' as x -> infinity", 100.0) in validate(unbounded).violations


def test_slip_angle_and_normals():
    d = hyperbolic_wall(1.0, 0.5, 1.0)
    x = 2.0
    t = math.atan(d.f_prime(x))
    assert slip_angle(d, x, LOWER) == pytest.approx(-t)
    assert slip_angle(d, x, UPPER) == pytest.approx(t)
    for side in (LOWER, UPPER):
        nx, ny = wall_normal(d, x, side)
        assert math.hypot(nx, ny) == pytest.approx(1.0)
        # tangent to the wall is perpendicular to the normal
        sig = slip_angle(d, x, side)
        assert nx * math.cos(sig) + ny * math.sin(sig) == pytest.approx(0.0, abs=1e-15)
    # normals point into the duct
    assert wall_normal(d, x, LOWER)[1] > 0 and wall_normal(d, x, UPPER)[1] < 0
    with pytest.raises(OutOfDomain):
        slip_angle(d, -1.0, LOWER)


def test_tabulated_wall_matches_samples(tmp_path):
    ref = hyperbolic_wall(1.0, 0.1, 1.0)
    xs = [float(x) for x in np.linspace(0.0, 10.0, 401)]
    fs = [ref.f(x) for x in xs]
    path = tmp_path / "wall.csv"
    path.write_text("x,f\n" + "".join(f"{x!r},{f!r}\n" for x, f in zip(xs, fs)), encoding="utf-8")
    d = load_wall_table(path)
    assert d.tabulated and d.x_max == 10.0
    for x in (0.0, 1.234, 7.5):
        assert d.f(x) == pytest.approx(ref.f(x), abs=1e-6)
        assert d.f_prime(x) == pytest.approx(ref.f_prime(x), abs=1e-4)
    assert validate(d).notes
    with pytest.raises(OutOfDomain):
        d.f(-0.5)


def test_tabulated_wall_rejects_bad_tables(tmp_path):
    with pytest.raises(InvalidParameter):
        tabulated_wall([0.0, 1.0], [1.0, 1.1])
    with pytest.raises(InvalidParameter):
        tabulated_wall([0.0, 2.0, 1.0], [1.0, 1.1, 1.2])
    with pytest.raises(InvalidParameter):
        tabulated_wall([0.5, 1.0, 2.0], [1.0, 1.1, 1.2])
    bad = tmp_path / "bad.csv"
    bad.write_text("x,y\n0,1\n", encoding="utf-8")
    with pytest.raises(InvalidParameter):
        load_wall_table(bad)
    bad.write_text("x,f\n0,1\n1,abc\n", encoding="utf-8")
    with pytest.raises(InvalidParameter):
        load_wall_table(bad)
