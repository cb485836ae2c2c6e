import math

import numpy as np
import pytest
from conftest import make_config

from ductmoc.diagnostics import (
    Check,
    DiagnosticsReport,
    char_relation_residuals,
    convergence_order,
    default_stations,
    diagnose,
    exact_wall_hit,
    fitted_order,
    flux_audit,
    inlet_fluxes,
    interface_deviation,
    kink_lines,
    mesh_lines,
    monotonicity_monitors,
    oracle_state_error,
    residual_orders,
    station_fluxes,
    symmetry_check,
    trace_streamlines,
    transport_residuals,
    vorticity_increment,
)
from ductmoc.errors import InvalidParameter, StationOutsideGas
from ductmoc.inflow import InflowModel, perturbed_profile


def test_check_verdicts_and_report_lookup():
    rep = DiagnosticsReport("t")
    rep.checks.append(Check("a", "rel", 1e-9, 1e-10, (0.0, 0.0), 1e-8, 3))
    rep.checks.append(Check("b", "rel", 5.0, 1.0, None, None, 3))
    assert rep.check("a").passed is True
    assert rep.check("b").passed is None
    assert rep.passed
    rep.checks.append(Check("c", "rel", 1.0, 1.0, None, 1e-3, 1))
    assert not rep.passed
    assert "[FAIL]" in rep.to_text() and "[info]" in rep.to_text()
    with pytest.raises(KeyError):
        rep.check("missing")


def test_fitted_order_recovers_power_law():
    hs = [0.1, 0.05, 0.025]
    assert fitted_order(hs, [3.0 * h**2 for h in hs]) == pytest.approx(2.0)
    assert fitted_order(hs, [0.5 * h for h in hs]) == pytest.approx(1.0)


def test_vorticity_increment_single_segment():
    # omega/rho changes by -delta2 K (c_b^2 - c_a^2); matches the transport closure
    model = InflowModel(perturbed_profile(2.0, 1.0, 1.0 / 1.4, 0.05), make_config("perturbed").gas())
    tr = model.transport_at_label(0.3)
    ca, cb = math.sqrt(tr.c2_in), 0.8
    inc = vorticity_increment(tr.delta2, tr.coupling, ca * ca, cb * cb)
    assert inc == pytest.approx(tr.omega_over_rho(cb) - tr.omega_over_rho(ca), rel=1e-13)
    assert vorticity_increment(0.0, 1.0, 1.0, 0.5) == 0.0


def test_residual_orders():
    a, b = DiagnosticsReport("a"), DiagnosticsReport("b")
    a.checks.append(Check("r", "", 4e-4, 0.0, None, None, 1))
    b.checks.append(Check("r", "", 1e-4, 0.0, None, None, 1))
    a.checks.append(Check("z", "", 0.0, 0.0, None, None, 1))
    b.checks.append(Check("z", "", 0.0, 0.0, None, None, 1))
    orders = residual_orders(a, b)
    assert orders["r"] == pytest.approx(2.0)
    assert orders["z"] == math.inf


def test_convergence_order_rejects_bad_ladders():
    cfg = make_config("mach2")
    args = (cfg.profile(), cfg.geometry(), cfg.solver())
    with pytest.raises(InvalidParameter):
        convergence_order(*args, [17, 17, 33])
    with pytest.raises(InvalidParameter):
        convergence_order(*args, [17, 33])
    pert = make_config("perturbed")
    with pytest.raises(InvalidParameter):
        convergence_order(pert.profile(), pert.geometry(), pert.solver(), [9, 17, 33])


def test_mesh_lines_sorted(mach2_small):
    for fam in ("plus", "minus"):
        for line in mesh_lines(mach2_small, fam):
            xs = [n.x for n in line]
            assert xs == sorted(xs) and len(xs) >= 2


def test_kink_lines_include_the_corner_characteristics(mach2_small):
    plus, minus = kink_lines(mach2_small)
    # the C+ from the lower corner and the C- from the upper corner
    assert 0 in plus and (len(mach2_small.inlet) - 1) in minus


def test_streamlines_follow_psi_levels(perturbed_small):
    traces = trace_streamlines(perturbed_small, 10)
    assert len(traces) == 10
    for tr in traces:
        assert np.all(np.diff(tr[:, 0]) >= 0.0)
        assert np.ptp(tr[:, -1]) <= 1e-12


def test_transport_on_perturbed_run(perturbed_small):
    rep = transport_residuals(perturbed_small, n_lines=20)
    assert rep.check("delta2 carried").passed
    assert rep.check("entropy invariance").max_residual < 1e-4
    assert rep.check("Bernoulli invariance").max_residual < 1e-3


def test_oracle_and_wall_hit_on_uniform_run(mach2_small):
    err, _ = oracle_state_error(mach2_small)
    assert err < 1e-12
    rep = diagnose(mach2_small)
    assert rep.check("simple-wave oracle").passed
    assert rep.passed


def test_exact_wall_hit_of_the_leading_line(mach2_small):
    # the C- line from the first interior node on the lower-corner C+ lands on the wall
    from ductmoc.diagnostics import _fan_region

    fan, region = _fan_region(mach2_small)
    walls = sorted(region.boundary["wall"], key=lambda n: n.x)
    w = walls[1]
    start = min((n for n in mach2_small.lines_minus[w.minus_id] if n is not w), key=lambda n: n.x)
    assert exact_wall_hit(fan, mach2_small.model.duct, start) == pytest.approx(w.x, abs=1e-2)


def test_inlet_fluxes_mach2(mach2_small):
    f = inlet_fluxes(mach2_small)
    assert f["mass"] == pytest.approx(4.0, rel=1e-12)
    assert f["energy"] == pytest.approx(18.0, rel=1e-12)
    at0 = station_fluxes(mach2_small, 0.0)
    assert at0["mass"] == pytest.approx(4.0, rel=1e-12)


def test_station_outside_gas(mach2_small):
    for x in (-1.0, math.inf, 1e3):
        with pytest.raises(StationOutsideGas):
            station_fluxes(mach2_small, x)


def test_flux_audit_small(mach2_small):
    rep = flux_audit(mach2_small, default_stations(mach2_small))
    assert rep.check("mass flux").samples == 5
    assert rep.check("mass flux").max_residual < 1e-2


def test_symmetry_and_axis(perturbed_small):
    rep = symmetry_check(perturbed_small)
    assert rep.check("mirror symmetry").passed
    assert rep.check("axis v").passed


def test_monitors_on_uniform_run(mach2_small):
    rep = monotonicity_monitors(mach2_small)
    for name in ("d+c <= 0", "d-c <= 0", "R+ <= 0", "R- <= 0", "c along C0"):
        assert rep.check(name).passed, name


def test_relation_residuals_are_small(perturbed_small):
    rep = char_relation_residuals(perturbed_small)
    for c in rep.checks:
        assert c.max_residual < 1e-2, c.name


def test_interface_deviation(mach10_small):
    rep = interface_deviation(mach10_small)
    assert rep.check("interface lower").passed
    assert rep.check("interface upper").passed
