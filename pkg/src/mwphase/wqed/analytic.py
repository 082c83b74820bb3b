"""Closed-form single-photon scattering off three qubits on a waveguide.

The qubits sit a quarter wavelength apart; the outer two decay into the
waveguide at rate ``Gamma`` and the middle one at ``gamma * Gamma``.  All
detunings are ``delta = v k - Omega`` in the same (angular) units as
``Gamma``.

Sign convention
---------------
The arctangent expression for the phase at full transmission fixes the
phase only modulo pi.  Evaluated exactly, the amplitude satisfies
``arg S21(delta_f^{+/-}) = +/-(theta_f(gamma) - pi)``, where ``theta_f`` is
the quadrant-aware value rising from 0 to pi returned by
:func:`full_transmission_phase`.  :func:`full_transmission_arg` returns the
signed value itself; it is the continuous branch of
``+/-arctan(sqrt(2g - g^2) / (1 - g))`` that coincides with the principal
value for ``g > 1``.
"""
from __future__ import annotations

import math

import numpy as np

from ..errors import ComputationError, ValidationError


def _check_gamma_ratio(gamma_ratio: float, *, allow_zero: bool = True) -> float:
    g = float(gamma_ratio)
    if not math.isfinite(g) or g < 0.0 or g >= 2.0 or (g == 0.0 and not allow_zero):
        raise ValidationError(
            f"coupling ratio must satisfy 0 <= gamma < 2 for a real full-transmission "
            f"detuning, got {gamma_ratio!r}"
        )
    return g


def single_photon_s21(delta, gamma_rate: float, gamma_ratio: float):
    """Single-photon transmission amplitude of the three-qubit shifter.

    Parameters
    ----------
    delta : float or array_like
        Detuning ``v k - Omega``.
    gamma_rate : float
        Decay rate ``Gamma`` of the outer qubits (> 0).
    gamma_ratio : float
        Middle-qubit rate divided by ``Gamma``.

    Returns
    -------
    complex or ndarray
        ``2 d^3 / ((i G + d) (2 d^2 - g G (G - i d)))``.
    """
    if not (gamma_rate > 0 and math.isfinite(gamma_rate)):
        raise ValidationError(f"gamma_rate must be positive and finite, got {gamma_rate!r}")
    if not math.isfinite(gamma_ratio):
        raise ValidationError("gamma_ratio must be finite")
    d = np.asarray(delta, dtype=float)
    if not np.all(np.isfinite(d)):
        raise ValidationError("detuning must be finite")
    G, g = float(gamma_rate), float(gamma_ratio)
    out = 2.0 * d**3 / ((1j * G + d) * (2.0 * d**2 - g * G * (G - 1j * d)))
    return out[()] if out.ndim == 0 else out


def full_transmission_detuning(gamma_ratio: float, gamma_rate: float) -> tuple[float, float]:
    """Both detunings ``+/- sqrt(gamma / (2 - gamma)) Gamma`` of unit transmission.

    ``gamma = 0`` is accepted and returns ``(0.0, -0.0)``; there the
    transmission itself vanishes (degenerate point, see
    :func:`is_degenerate_ratio`).
    """
    g = _check_gamma_ratio(gamma_ratio)
    if not gamma_rate > 0:
        raise ValidationError("gamma_rate must be positive")
    d = math.sqrt(g / (2.0 - g)) * gamma_rate
    return d, -d


def is_degenerate_ratio(gamma_ratio: float) -> bool:
    """True where the full-transmission detuning collapses onto the zero of S21."""
    return float(gamma_ratio) == 0.0


def full_transmission_phase(gamma_ratio: float) -> float:
    """Unsigned transmission phase at full transmission, continuous on [0, 2).

    Evaluates ``arctan(sqrt(2g - g^2) / (1 - g))`` with a quadrant-aware
    arctangent, so the value rises from 0 at ``g = 0`` through ``pi/2`` at
    ``g = 1`` towards ``pi`` as ``g -> 2``.
    """
    g = _check_gamma_ratio(gamma_ratio)
    return math.atan2(math.sqrt(2.0 * g - g * g), 1.0 - g)


def full_transmission_arg(gamma_ratio: float, sign: int = 1) -> float:
    """Exact ``arg S21`` at ``delta_f^{+}`` (``sign=1``) or ``delta_f^{-}`` (``sign=-1``).

    Equals ``sign * (full_transmission_phase(g) - pi)``: ``-pi/2`` at
    ``g = 1`` for the upper root, approaching 0 as ``g -> 2``.
    """
    if sign not in (1, -1):
        raise ValidationError("sign must be +1 or -1")
    return sign * (full_transmission_phase(gamma_ratio) - math.pi)


def transmission_band(
    gamma_ratio: float,
    gamma_rate: float,
    amplitude_threshold: float,
    *,
    xtol: float = 1e-10,
) -> tuple[float, float]:
    """Detuning interval around ``delta_f^+`` where ``|S21| >= threshold``.

    Returns
    -------
    (delta_lo, delta_hi) : tuple of float
        Threshold crossings below and above ``delta_f^+``, located by
        bisection to ``xtol * Gamma``.  ``delta_hi`` is ``inf`` when the
        amplitude never drops back below the threshold at large detuning,
        which happens for moderate to large ``gamma``.
    """
    g = _check_gamma_ratio(gamma_ratio, allow_zero=False)
    thr = float(amplitude_threshold)
    if not (0.0 < thr <= 1.0):
        raise ValidationError("amplitude threshold must lie in (0, 1]")
    G = float(gamma_rate)
    df, _ = full_transmission_detuning(g, G)
    if thr == 1.0:
        return df, df

    def excess(d: float) -> float:
        return abs(single_photon_s21(d, G, g)) - thr

    def bisect(a: float, b: float) -> float:
        # excess(a) < 0 <= excess(b) or the reverse
        fa = excess(a)
        while abs(b - a) > xtol * G:
            mid = 0.5 * (a + b)
            fm = excess(mid)
            if (fm < 0) == (fa < 0):
                a, fa = mid, fm
            else:
                b = mid
        return 0.5 * (a + b)

    # S21 vanishes at delta = 0, so a crossing exists in (0, delta_f)
    lo = bisect(0.0, df)

    # above delta_f: look for a dip below threshold before the asymptote
    ds = df * np.geomspace(1.0 + 1e-9, 1e4, 4000) if df > 0 else np.geomspace(1e-6, 1e4, 4000) * G
    mags = np.abs(single_photon_s21(ds, G, g))
    below = np.nonzero(mags < thr)[0]
    if below.size == 0:
        hi = math.inf
    else:
        k = int(below[0])
        hi = bisect(float(ds[k]), float(ds[k - 1]) if k > 0 else df)
    if not lo <= df <= hi:
        raise ComputationError("band bracketing failed")
    return lo, hi
