import math

import numpy as np

from mwphase.wqed.analytic import single_photon_s21
from mwphase.wqed.stationary import (
    collimated_nonlinear_phase,
    correlated_density,
    effective_hamiltonian,
    single_photon_amplitudes,
    two_photon_correction,
)


def test_single_photon_matches_closed_form():
    for g in (0.21, 0.62, 1.0, 1.5):
        for d in (-2.0, -0.3, 0.4, 1.7):
            t, _ = single_photon_amplitudes(d, g)
            assert abs(t - single_photon_s21(d, 1.0, g)) < 1e-12


def test_effective_hamiltonian_dissipative():
    ev = np.linalg.eigvals(effective_hamiltonian(0.62))
    assert np.all(ev.imag <= 1e-14)


def test_correction_decays_with_separation():
    _, b = two_photon_correction(0.5, 0.62, [0.0, 50.0, 200.0])
    assert abs(b[2]) < 1e-6 * abs(b[0])


def test_collimated_phase_values():
    assert abs(collimated_nonlinear_phase(0.62) - math.pi / 4) < 0.05 * math.pi / 4
    assert abs(abs(collimated_nonlinear_phase(0.62, branch=-1)) - abs(collimated_nonlinear_phase(0.62))) < 1e-12


def test_density_tends_to_linear_far_apart():
    r = correlated_density(0.62, [0.0, 100.0])
    assert abs(r[1] - 1.0) < 1e-6
