import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mwphase.errors import InvalidElementError, SingularNetworkError, ValidationError
from mwphase.network import (
    IDENTITY,
    TwoPortABCD,
    abcd_line,
    abcd_series,
    abcd_series_lc,
    abcd_shunt,
    cascade,
    matched_line_s21,
    s_params,
)


def test_matched_line_is_pure_phase():
    for phi in (0.0, 0.3, 1.7, -2.4):
        s = s_params(abcd_line(phi, 50.0), 50.0)
        assert abs(s.s21 - matched_line_s21(phi)) < 1e-14
        assert abs(abs(s.s21) - 1.0) < 1e-14
        assert abs(s.s11) < 1e-14


def test_series_impedance_transmission():
    z, z0 = 30.0 + 20.0j, 50.0
    s = s_params(abcd_series(z), z0)
    assert abs(s.s21 - 2 * z0 / (2 * z0 + z)) < 1e-14
    assert abs(s.s11 - z / (2 * z0 + z)) < 1e-14


def test_shunt_admittance_transmission():
    y, z0 = 0.01j, 50.0
    s = s_params(abcd_shunt(y), z0)
    assert abs(s.s21 - 2 / (2 + y * z0)) < 1e-14


def test_cascade_of_two_lines_adds_lengths():
    a = cascade([abcd_line(0.4, 50.0), abcd_line(0.9, 50.0)])
    b = abcd_line(1.3, 50.0)
    assert np.allclose(a.matrix(), b.matrix(), atol=1e-14)


def test_cascade_rejects_empty():
    with pytest.raises(ValidationError):
        cascade([])


def test_identity_is_neutral():
    m = abcd_series(5 + 1j)
    assert np.allclose((IDENTITY @ m).matrix(), m.matrix())
    assert np.allclose((m @ IDENTITY).matrix(), m.matrix())


def test_invalid_elements():
    with pytest.raises(InvalidElementError):
        abcd_series(complex("inf"))
    with pytest.raises(InvalidElementError):
        abcd_shunt(float("nan"))
    with pytest.raises(ValidationError):
        abcd_line(0.1, 0.0)
    with pytest.raises(ValidationError):
        s_params(IDENTITY, -1.0)


def test_open_circuit_at_lc_resonance():
    omega, cap = 2 * math.pi * 5e9, 1e-13
    l = 1.0 / (omega * omega * cap)
    el = abcd_series_lc(l, cap, omega)
    assert el.is_open
    assert el.weight == 0.0
    s = s_params(cascade([abcd_line(0.3, 50.0), el, abcd_line(0.2, 50.0)]), 50.0)
    assert s.s21 == 0
    assert abs(abs(s.s11) - 1.0) < 1e-12


def test_singular_denominator():
    with pytest.raises(SingularNetworkError):
        s_params(TwoPortABCD.from_entries(1.0, -50.0, 0.0, 0.0), 50.0)


@settings(max_examples=200, deadline=None)
@given(
    st.floats(0.0, 2e-9),
    st.floats(1e-15, 1e-13),
    st.floats(-3.0, 3.0),
    st.floats(10.0, 100.0),
)
def test_lossless_reciprocal_chain(l, cap, phi, z0):
    omega = 2 * math.pi * 6e9
    m = cascade([abcd_series_lc(l, cap, omega), abcd_line(phi, z0), abcd_series_lc(l, cap, omega)])
    s = s_params(m, z0)
    assert abs(s.power_balance() - 1.0) < 1e-9
    assert abs(s.s21 - s.s12) < 1e-9 * max(1.0, abs(s.s21))
    assert abs(m.determinant() - 1.0) < 1e-9 or m.is_open


def test_line_phase_convention_sign():
    s = s_params(abcd_line(math.pi / 2, 50.0), 50.0)
    assert abs(s.s21 - cmath.exp(-0.5j * math.pi)) < 1e-14
