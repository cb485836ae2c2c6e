import math

import numpy as np
import pytest

from ductmoc.errors import InvalidParameter, ProfileViolation
from ductmoc.gas_state import GasConstants, sound_speed
from ductmoc.inflow import InflowModel, InletProfile, check_profile, load_inlet_table, perturbed_profile, uniform_profile

G = GasConstants(1.4)
S0 = 1.0 / 1.4


def test_uniform_profile_passes_checks():
    p = uniform_profile(2.0, 1.0, S0)
    check_profile(p, G)
    m = InflowModel(p, G)
    assert m.psi_total == pytest.approx(4.0)
    assert m.label_from_psi(m.psi(0.3)) == pytest.approx(0.3)
    tr = m.transport(1.0)
    assert tr.E_hat == pytest.approx(4.5)
    assert tr.delta2 == 0.0 and tr.omega_in == 0.0


def test_perturbed_profile_is_even_and_isobaric():
    p = perturbed_profile(2.0, 1.0, S0, 0.01)
    check_profile(p, G)
    for y in (0.1, 0.5, 0.9):
        assert p.u(y) == p.u(-y)
        assert p.s(y) * p.rho(y) ** 1.4 == pytest.approx(S0, rel=1e-14)
    assert p.u(0.0) == pytest.approx(2.02)
    assert not p.uniform
    assert perturbed_profile(2.0, 1.0, S0, 0.0).uniform


def test_stream_function_inverse_and_total():
    p = perturbed_profile(2.0, 1.0, S0, 0.05)
    m = InflowModel(p, G)
    from scipy.integrate import quad

    total = quad(lambda y: p.rho(y) * p.u(y), -1.0, 1.0, epsabs=1e-14)[0]
    assert m.psi_total == pytest.approx(total, rel=1e-12)
    for y in np.linspace(-1.0, 1.0, 17):
        assert m.label_from_psi(m.psi(y)) == pytest.approx(y, abs=1e-12)
        assert m.psi(-y) == pytest.approx(-m.psi(y), abs=1e-14)


def test_transport_invariants_of_perturbed_profile():
    p = perturbed_profile(2.0, 1.0, S0, 0.05)
    m = InflowModel(p, G)
    y = 0.4
    tr = m.transport_at_label(y)
    c = sound_speed(p.rho(y), p.s(y), G)
    assert tr.s == p.s(y)
    assert tr.E_hat == pytest.approx(0.5 * p.u(y) ** 2 + c * c / 0.4)
    assert tr.delta2 == pytest.approx(p.ds(y) * (c / p.u(y)) / c**6, rel=1e-14)
    assert tr.omega_in == pytest.approx(p.du(y) / p.rho(y))
    # at the inlet sound speed the vorticity law returns the inlet value
    assert tr.omega_over_rho(c) == pytest.approx(tr.omega_in, rel=1e-15)


@pytest.mark.parametrize(
    "profile,clause",
    [
        (uniform_profile(0.5, 1.0, S0), "A2"),
        (uniform_profile(2.0, -1.0, S0), "A2"),
        (InletProfile(1.0, lambda y: 2.0 + 0.1 * y, lambda y: 1.0, lambda y: S0, lambda y: 0.1, lambda y: 0.0), "A3"),
        (InletProfile(1.0, lambda y: 2.0, lambda y: 1.0 + 0.1 * y * y, lambda y: S0, lambda y: 0.0,
                      lambda y: 0.0), "A2"),
        (InletProfile(1.0, lambda y: 2.0 + y * y, lambda y: 1.0, lambda y: S0, lambda y: 0.0, lambda y: 0.0), "A1"),
        (InletProfile(1.0, lambda y: 2.0, lambda y: 1.0, lambda y: S0, lambda y: 0.0, lambda y: 0.0,
                      v=lambda y: 0.1), "A2"),
    ],
)
def test_check_profile_names_the_failed_assumption(profile, clause):
    with pytest.raises(ProfileViolation) as info:
        check_profile(profile, G)
    assert info.value.clause == clause


def test_unknown_shape():
    with pytest.raises(InvalidParameter):
        perturbed_profile(2.0, 1.0, S0, 0.01, shape="square")


def test_table_profile(tmp_path):
    ref = perturbed_profile(2.0, 1.0, S0, 0.01)
    ys = [float(y) for y in np.linspace(-1.0, 1.0, 201)]
    rows = "".join(f"{y!r},{ref.u(y)!r},{ref.rho(y)!r},{ref.s(y)!r}\n" for y in ys)
    path = tmp_path / "inlet.csv"
    path.write_text("y,u,rho,s\n" + rows, encoding="utf-8")
    p = load_inlet_table(path)
    assert p.f0 == 1.0
    assert p.u(0.37) == pytest.approx(ref.u(0.37), rel=1e-7)
    assert p.ds(0.37) == pytest.approx(ref.ds(0.37), rel=1e-3)
    path.write_text("y,u\n0,1\n", encoding="utf-8")
    with pytest.raises(InvalidParameter):
        load_inlet_table(path)


def test_uniform_model_cot_integral():
    m = InflowModel(uniform_profile(2.0, 1.0, S0), G)
    assert m.G(0.5) == pytest.approx(0.5 * math.sqrt(3.0))
    assert m.y_from_G(m.G(-0.25)) == pytest.approx(-0.25)
