"""Fast invariant suite behind ``mwphase selftest``.

Every check is cheap (the whole suite runs in a few seconds) and compares
two independent routes or tests an exact identity.
"""
from __future__ import annotations

import math
from typing import Callable

import numpy as np


def _oracle() -> float:
    from .squid import SquidDevice, s21_cascade, s21_closed_form

    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(200):
        l1, l2 = rng.uniform(0.0, 2e-9, 2)
        dev = SquidDevice(1e-6, 1e-6, rng.uniform(1e-15, 1e-13), rng.uniform(10, 100),
                          rng.uniform(-4, 4), 2 * math.pi * rng.uniform(1e9, 1e10))
        a, b = s21_closed_form(l1, l2, dev), s21_cascade(l1, l2, dev)
        worst = max(worst, abs(a - b) / abs(b))
    return worst


def _design() -> float:
    from .squid import SquidDevice, design_phase_shifter, s21_closed_form

    dev = SquidDevice(0.7e-6, 2.2e-6, 26e-15, 50.0, 2.01)
    worst = 0.0
    for th in np.linspace(-3.0, 3.0, 61):
        d = design_phase_shifter(float(th), dev)
        if not d.feasible:
            continue
        s = s21_closed_form(d.l1, d.l2, dev)
        dph = np.angle(s * np.exp(-1j * (2 * dev.phi_line + th)))
        worst = max(worst, abs(abs(s) - 1.0), abs(dph))
    return worst


def _lossless() -> float:
    from .squid import SquidDevice, flux_sweep

    sw = flux_sweep(SquidDevice(0.7e-6, 2.2e-6, 26e-15, 50.0, 2.01), n1=31, n2=31)
    return float(np.max(np.abs(sw.power_balance() - 1.0)))


def _single_photon() -> float:
    from .wqed.analytic import full_transmission_arg, full_transmission_detuning, single_photon_s21

    worst = 0.0
    for g in (0.1, 0.5, 1.0, 1.5, 1.9):
        for d, sign in zip(full_transmission_detuning(g, 1.0), (1, -1)):
            s = single_photon_s21(d, 1.0, g)
            dph = np.angle(s * np.exp(-1j * full_transmission_arg(g, sign)))
            worst = max(worst, abs(abs(s) - 1.0), abs(dph))
    return worst


def _compensation() -> float:
    from .flux_control import compensation_currents, example_matrix

    m = example_matrix()
    target = np.array([0.1, 0.25, 0.4]) * 2.067833848e-15
    cur = compensation_currents(m, target)
    return float(np.linalg.norm(m @ cur - target) / np.linalg.norm(target))


def _kernels() -> float:
    from .wqed.kernels import BACKEND, Geometry, get_kernels

    geo = Geometry(40, 1.0, np.array([18, 19, 20]), np.array([0.3, 0.25, 0.3]),
                   np.array([0.1, 0.1, 0.1]), True)
    rng = np.random.default_rng(3)
    psi = rng.normal(size=geo.size) + 1j * rng.normal(size=geo.size)
    ref = get_kernels("python").apply_h2(psi, geo)
    got = get_kernels(BACKEND).apply_h2(psi, geo)
    return float(np.max(np.abs(ref - got)))


def _norm() -> float:
    from .wqed.evolve import _interval, chebyshev_coefficients
    from .wqed.kernels import Geometry, get_kernels
    from .wqed.state import TwoPhotonState

    geo = Geometry(60, 1.0, np.array([29, 30, 31]), np.array([0.3, 0.25, 0.3]),
                   np.array([0.1, 0.1, 0.1]), True)
    x = np.arange(60)
    phi = np.zeros(63, dtype=complex)
    phi[:60] = np.exp(-0.5 * ((x - 15) / 4.0) ** 2 + 0.5j * np.pi * x)
    psi = TwoPhotonState.from_product(phi, None, geo)
    lo, hi = geo.single_particle_bounds()
    scale, center = _interval(2 * lo, 2 * hi)
    c = chebyshev_coefficients(scale, center, 12.0)
    out = TwoPhotonState(get_kernels().chebyshev_series(psi.data, c, scale, center, geo),
                         60, 3, True)
    return abs(out.norm_squared() - 1.0)


CHECKS: list[tuple[str, Callable[[], float], float]] = [
    ("closed form vs cascade (relative)", _oracle, 1e-9),
    ("design identity |S21| and phase", _design, 1e-9),
    ("losslessness of flux sweep", _lossless, 1e-9),
    ("single-photon full transmission", _single_photon, 1e-10),
    ("flux compensation residual", _compensation, 1e-10),
    ("compiled vs python kernel", _kernels, 1e-12),
    ("two-photon norm conservation", _norm, 1e-8),
]


def run_selftest(verbose: bool = True) -> int:
    """Run all checks; return the number of failures."""
    failures = 0
    for name, fn, tol in CHECKS:
        try:
            val = fn()
            ok = bool(val <= tol)
        except Exception as exc:  # a crashing check is a failure, not an abort
            val, ok = float("nan"), False
            if verbose:
                print(f"  {name}: raised {type(exc).__name__}: {exc}")
        failures += not ok
        if verbose:
            print(f"{'PASS' if ok else 'FAIL'} {name}: {val:.3e} (tol {tol:.0e})")
    return failures
