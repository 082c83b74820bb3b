import math

import numpy as np
import pytest

from mwphase.errors import ValidationError
from mwphase.wqed.analysis import (
    extract_nonlinear_correction,
    extrapolate_collimated,
    overlap_error,
    phase_error,
    reflection_density,
    transmitted_probability,
)
from mwphase.wqed.evolve import (
    Pulse,
    chebyshev_coefficients,
    evolve_single,
    evolve_two_photon,
    gaussian_packet,
    linear_reference,
    plan_run,
    propagate_vector,
)
from mwphase.wqed.lattice import LatticeConfig, build_lattice_model, lattice_s21, stationary_s21
from mwphase.wqed.pipeline import prepare_model


@pytest.fixture(scope="module")
def small_model():
    """Strong coupling keeps the pulses short and the lattice small."""
    return prepare_model(0.62, gamma_over_v=0.2)


@pytest.fixture(scope="module")
def small_runs(small_model):
    pulse = Pulse(12.0)
    plan = plan_run(small_model, pulse)
    nl = evolve_two_photon(small_model, pulse, plan=plan)
    bos = evolve_two_photon(small_model.with_hardcore(False), pulse, plan=plan)
    lin = linear_reference(small_model, pulse, plan)
    free = linear_reference(small_model, pulse, plan, free=True)
    return nl, bos, lin, free


def test_chebyshev_matches_dense_exponential():
    rng = np.random.default_rng(4)
    h = rng.normal(size=(12, 12))
    h = h + h.T
    psi = rng.normal(size=12) + 0j
    w, v = np.linalg.eigh(h)
    exact = v @ (np.exp(-1j * w * 3.0) * (v.T @ psi))
    got = propagate_vector(h, psi, 3.0, (w.min(), w.max()))
    assert np.max(np.abs(got - exact)) < 1e-12


def test_chebyshev_coefficients_decay():
    c = chebyshev_coefficients(2.0, 0.0, 10.0)
    assert abs(c[-1]) < 1e-15 * 10


def test_norm_conserved(small_runs):
    nl, bos, _, _ = small_runs
    assert nl.meta["norm_drift"] < 1e-8
    assert bos.meta["norm_drift"] < 1e-8
    assert nl.meta["energy_drift"] < 1e-8


def test_exchange_symmetry_exact(small_runs):
    nl = small_runs[0]
    x = np.arange(nl.n)
    assert nl.symmetry_defect(x[:, None], x[None, :]) == 0.0


def test_hardcore_off_equals_product_of_single_photons(small_runs):
    _, bos, lin, _ = small_runs
    assert np.max(np.abs(bos.data[: bos.n_pp] - lin.data[: lin.n_pp])) < 1e-8


def test_hardcore_off_pair_transmission_is_product(small_runs):
    _, bos, lin, free = small_runs
    plan = lin.meta["plan"]
    qr = plan.middle_site + lin.meta["model"].spacing
    p1 = np.sum(np.abs(lin.meta["single"][0][qr + 1 : plan.n_sites]) ** 2)
    p1_free = np.sum(np.abs(free.meta["single"][0][qr + 1 : plan.n_sites]) ** 2)
    got = transmitted_probability(bos) / transmitted_probability(free)
    assert abs(got - (p1 / p1_free) ** 2) < 1e-8


def _pair_transmission(g, gamma_over_v, width):
    m = prepare_model(g, gamma_over_v=gamma_over_v)
    pulse = Pulse(width)
    plan = plan_run(m, pulse)
    bos = evolve_two_photon(m.with_hardcore(False), pulse, plan=plan)
    free = linear_reference(m, pulse, plan, free=True)
    return m, plan, transmitted_probability(bos) / transmitted_probability(free)


def test_hardcore_off_transmission_matches_stationary_spectrum():
    """Pair transmission equals the square of the spectrally averaged |S21|^2."""
    m, plan, got = _pair_transmission(1.5, 0.2, 20.0)
    phi = gaussian_packet(plan.n_sites, 3, plan.pulse_center, 20.0, m.carrier_momentum)
    amp = np.fft.fft(phi[: plan.n_sites], 4096)
    ks = 2 * np.pi * np.fft.fftfreq(4096)
    wts = np.abs(amp) ** 2
    sel = (wts > 1e-10 * wts.max()) & (ks > 0)
    s = m.spacing
    t2 = np.array([abs(stationary_s21(64, 1.0, [30 - s, 30, 30 + s], m.couplings, m.omega, k)) ** 2
                   for k in ks[sel]])
    p1 = np.sum(wts[sel] * t2) / np.sum(wts[sel])
    assert abs(got - p1**2) < 1e-4


def test_hardcore_off_transmission_is_s21_to_the_fourth():
    m, _, got = _pair_transmission(1.5, 0.1, 40.0)
    assert abs(got - abs(lattice_s21(m, m.detuning)) ** 4) < 0.01


def test_nonlinear_correction_vanishes_without_hardcore(small_runs):
    _, bos, lin, free = small_runs
    corr = extract_nonlinear_correction(bos, lin, free, np.arange(0, 10))
    assert np.nanmax(np.abs(corr.b)) < 1e-6
    assert abs(corr.nonlinear_phase) < 1e-6
    assert abs(reflection_density(bos, lin)) < 1e-8


def test_hardcore_generates_nonlinearity(small_runs):
    nl, _, lin, free = small_runs
    corr = extract_nonlinear_correction(nl, lin, free, np.arange(0, 10))
    assert abs(corr.nonlinear_phase) > 0.1


def test_error_metrics_zero_for_self_ideal(small_runs):
    _, _, lin, _ = small_runs
    for x in (5.0, 20.0):
        assert overlap_error(lin, 0.0, lin, x) < 1e-12
        assert phase_error(lin, 0.0, lin, x) < 1e-12
    rotated = lin.copy()
    rotated.data *= np.exp(0.7j)
    assert overlap_error(rotated, 0.7, lin, 10.0) < 1e-12
    assert phase_error(rotated, 0.7, lin, 10.0) < 1e-12


def test_single_photon_free_propagation_shifts_packet(small_model):
    pulse = Pulse(10.0)
    plan = plan_run(small_model, pulse)
    m = small_model.resized(plan.n_sites, plan.middle_site)
    phi = gaussian_packet(plan.n_sites, 3, plan.pulse_center, 10.0, m.carrier_momentum)
    out = evolve_single(m, phi, plan.final_time, free=True)
    peak = int(np.argmax(np.abs(out[: plan.n_sites])))
    assert abs(peak - (plan.pulse_center + m.velocity * plan.final_time)) <= 1


def test_extrapolation_recovers_line():
    w = np.array([50.0, 75.0, 100.0])
    e = extrapolate_collimated(w, 0.8 - 3.0 / w)
    assert abs(e.intercept - 0.8) < 1e-12 and abs(e.slope + 3.0) < 1e-10
    with pytest.raises(ValidationError):
        extrapolate_collimated([1.0, 1.0, 2.0], [0.1, 0.2, 0.3])


def test_plan_rejects_nonpositive_width():
    m = build_lattice_model(LatticeConfig(gamma_ratio=0.62))
    with pytest.raises(ValidationError):
        plan_run(m, Pulse(0.0))
