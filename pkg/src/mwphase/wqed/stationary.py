"""Stationary (plane-wave) scattering in the Markovian continuum model.

Three emitters at ``x = -pi/2k, 0, pi/2k`` couple to a chiral-free
waveguide with linear dispersion; propagation phases between emitters are
frozen at the carrier, so the single-excitation dynamics is governed by the
non-Hermitian matrix

    H_eff[i, j] = -(i/2) sqrt(G_i G_j) exp(i k0 |x_i - x_j|)

measured from the emitter frequency.  A two-photon plane wave with both
photons at detuning ``delta`` scatters into the product of single-photon
amplitudes plus a correlated term ``B(delta, dx)`` generated by the
hard-core constraint on each emitter.  The correlated term is obtained by
imposing that the doubly-excited emitter amplitudes vanish, which fixes a
three-component source; its emission into the outgoing two-photon channel
decays with ``|dx|`` through the complex eigenvalues of ``H_eff``.

This route gives the monochromatic, coincident-photon values that the
lattice time evolution approaches for wide pulses and small ``Gamma / v``.
"""
from __future__ import annotations

import math

import numpy as np

from ..errors import ValidationError
from .analytic import _check_gamma_ratio, full_transmission_detuning

_KX = np.array([-0.5 * math.pi, 0.0, 0.5 * math.pi])


def _rates(gamma_ratio: float, gamma_rate: float) -> np.ndarray:
    if not gamma_rate > 0:
        raise ValidationError("gamma_rate must be positive")
    return np.array([gamma_rate, gamma_ratio * gamma_rate, gamma_rate])


def effective_hamiltonian(gamma_ratio: float, gamma_rate: float = 1.0) -> np.ndarray:
    """Non-Hermitian single-excitation emitter Hamiltonian (emitter frequency removed)."""
    g = _rates(gamma_ratio, gamma_rate)
    sep = np.abs(np.subtract.outer(_KX, _KX))
    return -0.5j * np.sqrt(np.outer(g, g)) * np.exp(1j * sep)


def single_photon_amplitudes(delta: float, gamma_ratio: float, gamma_rate: float = 1.0,
                             velocity: float = 1.0) -> tuple[complex, np.ndarray]:
    """Transmission amplitude and emitter amplitudes for one photon at ``delta``.

    Returns
    -------
    (t, e) : complex, ndarray of shape (3,)
        ``t`` equals the closed-form single-photon transmission; ``e`` are the
        steady-state emitter excitations for a unit-amplitude incident wave.
    """
    g = _rates(gamma_ratio, gamma_rate)
    h = effective_hamiltonian(gamma_ratio, gamma_rate)
    gc = np.sqrt(g * velocity / 2.0)
    e = np.linalg.solve(delta * np.eye(3) - h, gc * np.exp(1j * _KX))
    t = 1.0 - 1j * np.sum(gc / velocity * np.exp(-1j * _KX) * e)
    return complex(t), e


def two_photon_correction(delta: float, gamma_ratio: float, dx, gamma_rate: float = 1.0,
                          velocity: float = 1.0) -> tuple[complex, np.ndarray]:
    """Correlated transmitted term ``B(delta, dx)`` for two photons at ``delta`` each.

    ``dx`` is the photon separation in the length unit fixed by ``velocity``.

    Returns
    -------
    (t, B) : complex, ndarray
        Single-photon transmission and ``B`` sampled at ``dx``.  The
        transmitted two-photon density is ``t**2 + B``.
    """
    g = _rates(gamma_ratio, gamma_rate)
    h = effective_hamiltonian(gamma_ratio, gamma_rate)
    gc = np.sqrt(g * velocity / 2.0)
    t, e = single_photon_amplitudes(delta, gamma_ratio, gamma_rate, velocity)
    mu, r = np.linalg.eig(h)
    ri = np.linalg.inv(r)
    # projectors on the eigenmodes, proj[n, i, j] = r[i, n] ri[n, j]
    proj = np.einsum("in,nj->nij", r, ri)
    den = 2.0 * delta - mu[:, None] - mu[None, :]
    # two-emitter propagator restricted to double occupation of one emitter
    m = np.einsum("nij,pij,np->ij", proj, proj, 1.0 / den)
    src = -np.linalg.solve(m, e**2)
    amp = np.einsum("m,nmj->nj", -1j * gc / velocity * np.exp(-1j * _KX), proj)
    dxs = np.atleast_1d(np.asarray(dx, dtype=float))
    out = np.empty(dxs.shape, dtype=complex)
    for i, d in enumerate(dxs):
        ph = np.exp(-1j * (mu - delta) * abs(d) / velocity)
        out[i] = np.einsum("j,nj,pj,n,np->", src, amp, amp, ph, 1.0 / den)
    return t, out


def collimated_nonlinear_phase(gamma_ratio: float, *, branch: int = 1) -> float:
    """Nonlinear phase ``arg(1 + B(delta_f, 0) / t^2)`` of coincident photons.

    ``branch = +1`` evaluates at ``delta_f^+``, ``-1`` at ``delta_f^-``
    (the two differ only in sign).
    """
    g = _check_gamma_ratio(gamma_ratio, allow_zero=False)
    plus, minus = full_transmission_detuning(g, 1.0)
    d = plus if branch >= 0 else minus
    t, b = two_photon_correction(d, g, [0.0])
    return float(np.angle(1.0 + b[0] / t**2))


def correlated_density(gamma_ratio: float, dx, *, branch: int = 1) -> np.ndarray:
    """Normalized transmitted density ``1 + B(delta_f, dx) / t^2`` on a separation grid (units of v / Gamma)."""
    g = _check_gamma_ratio(gamma_ratio, allow_zero=False)
    plus, minus = full_transmission_detuning(g, 1.0)
    t, b = two_photon_correction(plus if branch >= 0 else minus, g, dx)
    return 1.0 + b / t**2
