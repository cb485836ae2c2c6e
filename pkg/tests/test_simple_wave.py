import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ductmoc.duct_geometry import hyperbolic_wall
from ductmoc.errors import NonSupersonic, OutOfRange, OutOfRegion
from ductmoc.gas_state import FlowState, GasConstants, derive, prandtl_meyer
from ductmoc.simple_wave import (
    build_fan,
    fan_derived,
    fan_sigma,
    fan_state,
    invert_sigma,
    oracle_field,
    vacuum_onset,
    vacuum_turning,
    wall_theta,
)

G = GasConstants(1.4)
S0 = 1.0 / 1.4
MACH2 = FlowState(2.0, 0.0, 1.0, S0)
MACH10 = FlowState(10.0, 0.0, 1.0, S0)


@pytest.fixture(scope="module")
def fan2():
    return build_fan(MACH2, G)


def test_fan_constants_mach2(fan2):
    # the sonic-point parameter equals the upstream Prandtl-Meyer angle
    assert fan2.theta_star == pytest.approx(0.46041368208269473, rel=1e-14)
    assert fan2.c_star == pytest.approx(math.sqrt(1.5), rel=1e-15)
    assert fan2.A0 == pytest.approx(math.pi / 6)
    assert fan2.theta_0 == pytest.approx(-math.pi / 3)
    assert fan2.E_hat == pytest.approx(4.5)


def test_fan_constants_mach10():
    fan = build_fan(MACH10, G)
    assert fan.c_star == pytest.approx(math.sqrt(17.5), rel=1e-15)
    assert fan.c_star == pytest.approx(4.18330, abs=5e-6)
    # flow angle at which the fan reaches vacuum: nu_max - nu(10)
    assert -vacuum_turning(fan) == pytest.approx(0.49109766751425808, rel=1e-13)


def test_fan_identities_on_a_thousand_samples(fan2):
    thetas = np.linspace(fan2.theta_min, fan2.theta_star, 1002)[1:-1]
    for th in thetas:
        p = fan_state(fan2, th)
        bern = p.c**2 / 0.4 + 0.5 * p.q**2
        assert abs(bern - fan2.E_hat) <= 1e-12 * fan2.E_hat
        assert abs(p.q**2 - (p.u**2 + p.v**2)) <= 1e-12 * p.q**2


def test_upstream_state_recovered(fan2):
    p = fan_state(fan2, fan2.theta_0)
    assert p.u == pytest.approx(2.0, rel=1e-14)
    assert p.v == pytest.approx(0.0, abs=1e-14)
    assert p.c == pytest.approx(1.0, rel=1e-14)
    assert p.sigma == pytest.approx(0.0, abs=1e-14)


def test_fan_lines_are_c_plus_characteristics(fan2):
    for th in np.linspace(fan2.theta_0, fan2.theta_min + 0.2, 7):
        p = fan_state(fan2, th)
        d = derive(p.state, G)
        assert d.alpha == pytest.approx(th + math.pi / 2, abs=1e-12)
        # simple wave along the lower wall: sigma + nu is the upstream value
        assert d.sigma + prandtl_meyer(d.A, G) == pytest.approx(prandtl_meyer(fan2.A0, G), abs=1e-12)
        assert fan_derived(fan2, th).c == pytest.approx(p.c)


def test_vacuum_end(fan2):
    p = fan_state(fan2, fan2.theta_min + 1e-12)
    assert p.c == pytest.approx(0.0, abs=1e-11)
    assert p.q == pytest.approx(math.sqrt(2 * fan2.E_hat), rel=1e-10)
    with pytest.raises(OutOfRange):
        fan_state(fan2, fan2.theta_min)
    with pytest.raises(OutOfRange):
        fan_state(fan2, fan2.theta_star + 0.1)


@settings(max_examples=150, deadline=None)
@given(st.floats(min_value=0.0, max_value=1.0))
def test_invert_sigma_round_trip(t):
    fan = build_fan(MACH2, G)
    th = fan.theta_min + 1e-9 + t * (fan.theta_star - fan.theta_min - 2e-9)
    back = invert_sigma(fan, fan_sigma(fan, th))
    assert fan_sigma(fan, back) == pytest.approx(fan_sigma(fan, th), abs=1e-12)


def test_invert_sigma_range(fan2):
    with pytest.raises(OutOfRange):
        invert_sigma(fan2, 1.0)


def test_vacuum_onset_mach10():
    fan = build_fan(MACH10, G)
    duct = hyperbolic_wall(1.0, 0.7, 1.0)
    x_v = vacuum_onset(fan, duct)
    assert x_v == pytest.approx(1.1840934536759051, rel=1e-12)
    assert duct.f_prime(x_v) == pytest.approx(0.53479893031518026, rel=1e-12)
    # the gentle Mach-2 duct never reaches vacuum
    assert vacuum_onset(build_fan(MACH2, G), hyperbolic_wall(1.0, 0.05, 1.0)) is None


def test_oracle_field(fan2):
    duct = hyperbolic_wall(1.0, 0.05, 1.0)
    # the leading fan line belongs to the fan and carries the upstream state
    r = 0.8
    assert oracle_field(fan2, duct, r * math.cos(fan2.A0), -1.0 + r * math.sin(fan2.A0)) == MACH2
    with pytest.raises(OutOfRegion):
        oracle_field(fan2, duct, 0.5, -0.1)
    # on the straight C+ line leaving the wall at xi the state is constant
    xi = 1.5
    th = wall_theta(fan2, duct, xi)
    ref = fan_state(fan2, th).state
    for r in (0.1, 0.4):
        x = xi - r * math.sin(th)
        y = -duct.f(xi) + r * math.cos(th)
        got = oracle_field(fan2, duct, x, y)
        assert got.u == pytest.approx(ref.u, rel=1e-9)
        assert got.v == pytest.approx(ref.v, rel=1e-9, abs=1e-12)


def test_build_fan_needs_supersonic_horizontal_state():
    with pytest.raises(NonSupersonic):
        build_fan(FlowState(0.5, 0.0, 1.0, S0), G)
    with pytest.raises(NonSupersonic):
        build_fan(FlowState(2.0, 0.1, 1.0, S0), G)
