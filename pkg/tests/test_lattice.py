import math

import numpy as np
import pytest

from mwphase.errors import ValidationError
from mwphase.wqed.lattice import (
    LatticeConfig,
    build_lattice_model,
    calibrate_coupling,
    lattice_s21,
    one_qubit_lineshape,
    stationary_s21,
)


@pytest.mark.parametrize("k0,spacing", [(math.pi / 2, 1), (math.pi / 4, 2), (math.pi / 8, 4)])
def test_quarter_wavelength_spacing(k0, spacing):
    m = build_lattice_model(LatticeConfig(k0=k0, gamma_ratio=0.62))
    assert m.spacing == spacing
    assert m.qubit_sites[1] == m.site_count // 2


def test_rejects_bad_configs():
    with pytest.raises(ValidationError):
        build_lattice_model(LatticeConfig(k0=1.0))
    with pytest.raises(ValidationError):
        build_lattice_model(LatticeConfig(n_sites=100))
    with pytest.raises(ValidationError):
        build_lattice_model(LatticeConfig(gamma_over_v=0.0))


def test_empty_chain_is_transparent():
    s = stationary_s21(64, 1.0, [30], [0.0], [0.0], math.pi / 2)
    assert abs(s - 1.0) < 1e-12


def test_single_emitter_reflects_on_resonance():
    m = calibrate_coupling(build_lattice_model(LatticeConfig(gamma_ratio=0.62)))
    site, e0 = m.qubit_sites[0], m.carrier_energy
    s = stationary_s21(m.site_count, 1.0, [site], [m.couplings[0]], [e0], m.carrier_momentum)
    assert abs(s) < 1e-3


def test_calibrated_lineshape_within_half_percent():
    m = calibrate_coupling(build_lattice_model(LatticeConfig(gamma_ratio=1.0)))
    assert m.calibrated
    G = m.gamma_rate
    ds = np.linspace(-3 * G, 3 * G, 31)
    got = np.array([
        stationary_s21(m.site_count, 1.0, [m.qubit_sites[0]], [m.couplings[0]],
                       [m.carrier_energy - d], m.carrier_momentum)
        for d in ds
    ])
    assert np.max(np.abs(got - one_qubit_lineshape(ds, G))) < 5e-3
    assert abs(m.couplings[1] - m.couplings[0]) < 1e-15


@pytest.mark.parametrize("g", [0.21, 1.5])
def test_three_qubit_lattice_matches_closed_form(g):
    from mwphase.wqed.analytic import single_photon_s21

    m = calibrate_coupling(build_lattice_model(LatticeConfig(gamma_ratio=g)))
    ds = np.linspace(-3, 3, 25) * m.gamma_rate
    err = np.max(np.abs(lattice_s21(m, ds) - single_photon_s21(ds, m.gamma_rate, g)))
    assert err < 0.01
