import math

import numpy as np
import pytest

from mwphase.errors import ValidationError
from mwphase.wqed.analytic import (
    full_transmission_arg,
    full_transmission_detuning,
    full_transmission_phase,
    is_degenerate_ratio,
    single_photon_s21,
    transmission_band,
)

GAMMAS = (0.1, 0.5, 1.0, 1.5, 1.9)


@pytest.mark.parametrize("g", GAMMAS)
def test_unit_transmission_at_both_roots(g):
    for d in full_transmission_detuning(g, 0.7):
        assert abs(abs(single_photon_s21(d, 0.7, g)) - 1.0) < 1e-12


@pytest.mark.parametrize("g", GAMMAS)
def test_signed_phase_at_roots(g):
    plus, minus = full_transmission_detuning(g, 1.0)
    sp, sm = single_photon_s21(plus, 1.0, g), single_photon_s21(minus, 1.0, g)
    assert abs(np.angle(sp * np.exp(-1j * full_transmission_arg(g, 1)))) < 1e-12
    assert abs(np.angle(sm * np.exp(-1j * full_transmission_arg(g, -1)))) < 1e-12
    # the tangent agrees with the arctangent expression regardless of branch
    x = math.sqrt(2 * g - g * g) / (1 - g) if g != 1.0 else math.inf
    if math.isfinite(x):
        assert abs(math.tan(np.angle(sp)) - x) < 1e-10 * max(1.0, abs(x))


def test_phase_branch_is_continuous_and_increasing():
    gs = np.linspace(0.0, 1.999, 400)
    ph = np.array([full_transmission_phase(g) for g in gs])
    assert ph[0] == 0.0
    assert np.all(np.diff(ph) > 0)
    assert abs(full_transmission_phase(1.0) - math.pi / 2) < 1e-15


def test_gamma_one_value():
    assert abs(single_photon_s21(1.0, 1.0, 1.0) - (-1j)) < 1e-12


def test_far_detuning_transmits():
    for g in GAMMAS:
        assert abs(abs(single_photon_s21(1000.0, 1.0, g)) - 1.0) < 1e-5


def test_zero_detuning_reflects():
    assert single_photon_s21(0.0, 1.0, 0.62) == 0


def test_degenerate_point():
    assert is_degenerate_ratio(0.0)
    assert full_transmission_detuning(0.0, 1.0)[0] == 0.0


@pytest.mark.parametrize("bad", [-0.1, 2.0, 2.5, float("nan")])
def test_rejects_out_of_range_ratio(bad):
    with pytest.raises(ValidationError):
        full_transmission_detuning(bad, 1.0)


def test_vectorized():
    d = np.linspace(-3, 3, 7)
    out = single_photon_s21(d, 1.0, 0.5)
    assert out.shape == (7,)
    assert np.allclose(out, [single_photon_s21(float(x), 1.0, 0.5) for x in d])
