import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mwphase.constants import PHI0
from mwphase.errors import DivergentInductanceError, InfeasibleInductanceError, ValidationError
from mwphase.squid import (
    SquidDevice,
    design_inductances,
    design_phase_shifter,
    feasible_theta_interval,
    flux_from_inductance,
    flux_sweep,
    full_transmission_curve,
    josephson_inductance,
    minimum_inductance,
    reference_transmission,
    s21_cascade,
    s21_closed_form,
    s_matrix_cascade,
)


def test_minimum_inductance_value():
    assert math.isclose(minimum_inductance(1e-6), PHI0 / (4 * math.pi * 1e-6), rel_tol=1e-15)


def test_inductance_periodic_and_even():
    f = np.linspace(-0.45, 0.45, 37)
    l0 = josephson_inductance(1e-6, f)
    assert np.allclose(josephson_inductance(1e-6, f + 1.0), l0, rtol=1e-12)
    assert np.allclose(josephson_inductance(1e-6, -f), l0, rtol=1e-12)


def test_inductance_diverges_at_half_flux():
    with pytest.raises(DivergentInductanceError):
        josephson_inductance(1e-6, 0.5)


def test_flux_round_trip():
    for f in (0.0, 0.1, 0.27, 0.49):
        l = josephson_inductance(0.7e-6, f)
        assert abs(flux_from_inductance(0.7e-6, l) - f) < 1e-10


def test_flux_below_minimum():
    with pytest.raises(InfeasibleInductanceError):
        flux_from_inductance(1e-6, 0.5 * minimum_inductance(1e-6))


def test_device_validation():
    with pytest.raises(ValidationError):
        SquidDevice(-1e-6, 1e-6, 1e-15)
    with pytest.raises(ValidationError):
        SquidDevice(1e-6, 1e-6, 1e-15, phi_line=float("nan"))


@settings(max_examples=300, deadline=None)
@given(
    st.floats(0.0, 3e-9),
    st.floats(0.0, 3e-9),
    st.floats(1e-15, 1e-13),
    st.floats(10.0, 100.0),
    st.floats(-4.0, 4.0),
    st.floats(1e9, 1e10),
)
def test_closed_form_matches_cascade(l1, l2, cap, z0, phi, freq):
    dev = SquidDevice(1e-6, 1e-6, cap, z0, phi, 2 * math.pi * freq)
    a = s21_closed_form(l1, l2, dev)
    b = s21_cascade(l1, l2, dev)
    assert abs(a - b) <= 1e-9 * abs(b)


def test_zero_inductance_is_bare_lines(device):
    s = s21_closed_form(0.0, 0.0, device)
    assert abs(s - np.exp(2j * device.phi_line)) < 1e-12


def test_cascade_lossless(device):
    s = s_matrix_cascade(3e-10, 1e-10, device)
    assert abs(s.power_balance() - 1.0) < 1e-12


def test_design_identity(device):
    lo, hi = feasible_theta_interval(device)
    for th in np.linspace(lo, hi, 25):
        d = design_phase_shifter(float(th), device)
        assert d.feasible
        s = s21_closed_form(d.l1, d.l2, device)
        assert abs(abs(s) - 1.0) < 1e-9
        assert abs(np.angle(s * np.exp(-1j * (2 * device.phi_line + th)))) < 1e-9


def test_design_zero_theta_is_trivial(device):
    assert design_inductances(0.0, device) == (0.0, 0.0)
    d = design_phase_shifter(0.0, device)
    assert not d.feasible and d.reason == "L below Lmin"


def test_design_reports_negative_inductance(device):
    reasons = {design_phase_shifter(float(t), device).reason for t in np.linspace(-3, 3, 121)}
    assert "negative inductance" in reasons


def test_flux_sweep_shapes_and_normalization(device):
    sw = flux_sweep(device, (0.0, 1.0), (0.0, 1.0), 11, 21)
    assert sw.s21.shape == (11, 21)
    assert abs(sw.s21[0, 0] - 1.0) < 1e-12
    assert sw.divergent[5, :].all() and sw.divergent[:, 10].all()
    assert np.max(np.abs(sw.power_balance() - 1.0)) < 1e-9


def test_flux_sweep_symmetric_about_half_flux(device):
    sw = flux_sweep(device, (0.0, 1.0), (0.0, 1.0), 21, 21)
    assert np.allclose(sw.s21_raw, sw.s21_raw[::-1, ::-1], atol=1e-12)


def test_reference_transmission_close_to_unity():
    dev = SquidDevice(1e-6, 1e-6, 26e-15, 50.0, 0.0)
    assert abs(abs(reference_transmission(dev)) - 0.98) < 0.01


def test_curve_monotone_phase_and_unit_magnitude(device):
    curve = full_transmission_curve(device, 41, ((0.3, 0.5), (0.0, 0.5)))
    th = np.array([c.theta for c in curve])
    tau = np.array([c.tau for c in curve])
    assert np.all(np.diff(th) > 0) and np.all(np.diff(tau) >= 0)
    assert tau[0] == 0.0 and tau[-1] == 1.0
    assert max(abs(abs(c.s21) - 1.0) for c in curve) < 1e-9
    assert all(0.3 <= c.flux1 <= 0.5 and 0.0 <= c.flux2 <= 0.5 for c in curve)


def test_curve_contour_cross_check(device):
    """Curve points sit on the |S21| = 1 contour of an independent flux sweep."""
    curve = full_transmission_curve(device, 9, ((0.3, 0.5), (0.0, 0.5)))
    for c in curve[1:-1]:
        l1 = josephson_inductance(device.ic1, c.flux1)
        l2 = josephson_inductance(device.ic2, c.flux2)
        assert abs(abs(s21_cascade(l1, l2, device)) - 1.0) < 1e-9
