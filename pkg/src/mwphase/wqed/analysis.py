"""Observables of scattered two-photon states.

All routines compare a hard-core run ``psi_nl`` with the bosonic
(non-interacting) reference ``psi_lin`` obtained from the same pulse on the
same lattice.  Positions are site indices; the transmitted region is every
site to the right of the last qubit.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import UndefinedDensityError, ValidationError
from .state import TwoPhotonState

ENVELOPE_FLOOR = 1e-8


def _last_qubit(state: TwoPhotonState) -> int:
    model = state.meta.get("model")
    if model is None:
        raise ValidationError("state carries no model; run it through evolve_two_photon")
    return int(model.qubit_sites[-1])


def _first_qubit(state: TwoPhotonState) -> int:
    return int(state.meta["model"].qubit_sites[0])


def _check_pair(psi_nl: TwoPhotonState, psi_lin: TwoPhotonState) -> None:
    if psi_nl.n != psi_lin.n or psi_nl.nq != psi_lin.nq:
        raise ValidationError("states live on different lattices")
    if abs(psi_nl.time - psi_lin.time) > 1e-9 * max(1.0, abs(psi_nl.time)):
        raise ValidationError("states are taken at different times")


def transmitted_center(psi_lin: TwoPhotonState) -> int:
    """Site of maximal linear coincidence density in the transmitted region."""
    qr = _last_qubit(psi_lin)
    x = np.arange(qr + 1, psi_lin.n)
    return int(x[np.argmax(np.abs(psi_lin.amplitude(x, x)))])


def slice_sites(center: int, dx) -> tuple[np.ndarray, np.ndarray]:
    """Site pairs ``(x1, x2)`` with ``x2 - x1 = dx`` straddling ``center``."""
    dx = np.asarray(dx, dtype=int)
    x1 = center - np.floor_divide(dx, 2)
    return x1, x1 + dx


@dataclass
class NonlinearCorrection:
    """Correlated transmitted amplitude along the relative coordinate.

    Attributes
    ----------
    dx : ndarray of int
        Photon separations ``x2 - x1`` in sites.
    b : ndarray of complex
        ``(psi_nl - psi_lin) / psi_free`` on the anti-diagonal slice.
    ratio : ndarray of complex
        ``psi_nl / psi_lin`` on the same slice.
    nonlinear_phase : float
        ``arg psi_nl - arg psi_lin`` at coincidence (``dx = 0``).
    center : int
        Site through which the slice passes.
    """

    dx: np.ndarray
    b: np.ndarray
    ratio: np.ndarray
    nonlinear_phase: float
    center: int


def extract_nonlinear_correction(
    psi_nl: TwoPhotonState,
    psi_lin: TwoPhotonState,
    psi_free: TwoPhotonState | None = None,
    dx=None,
    *,
    center: int | None = None,
    undefined: str = "raise",
) -> NonlinearCorrection:
    """Nonlinear correction ``B`` along the transmitted anti-diagonal slice.

    Parameters
    ----------
    psi_nl, psi_lin : TwoPhotonState
        Hard-core and bosonic final states from identical pulses.
    psi_free : TwoPhotonState, optional
        Freely propagated product envelope used to normalize ``B``; defaults
        to ``psi_lin`` (so ``b`` becomes ``psi_nl / psi_lin - 1``).
    dx : array_like of int, optional
        Separations to sample; defaults to ``0..2*width`` when the pulse is
        known, else ``0..100``.
    center : int, optional
        Slice centre; defaults to :func:`transmitted_center`.
    undefined : {"raise", "nan"}
        Behaviour where the envelope magnitude is below ``1e-8``.

    Raises
    ------
    UndefinedDensityError
        If ``undefined == "raise"`` and some sample has a vanishing envelope.
    """
    _check_pair(psi_nl, psi_lin)
    if undefined not in ("raise", "nan"):
        raise ValidationError("undefined must be 'raise' or 'nan'")
    ref = psi_lin if psi_free is None else psi_free
    c = transmitted_center(psi_lin) if center is None else int(center)
    if dx is None:
        pulse = psi_lin.meta.get("pulse")
        hi = int(math.ceil(2.0 * pulse.width)) if pulse is not None else 100
        dx = np.arange(0, hi + 1)
    dx = np.atleast_1d(np.asarray(dx, dtype=int))
    x1, x2 = slice_sites(c, dx)
    qr = _last_qubit(psi_lin)
    inside = (x1 > qr) & (x2 < psi_lin.n) & (x1 >= 0)
    a_nl = np.full(dx.shape, np.nan + 0j)
    a_lin = np.full(dx.shape, np.nan + 0j)
    a_ref = np.full(dx.shape, np.nan + 0j)
    a_nl[inside] = psi_nl.amplitude(x1[inside], x2[inside])
    a_lin[inside] = psi_lin.amplitude(x1[inside], x2[inside])
    a_ref[inside] = ref.amplitude(x1[inside], x2[inside])
    bad = ~inside | (np.abs(a_ref) < ENVELOPE_FLOOR) | (np.abs(a_lin) < ENVELOPE_FLOOR)
    if bad.any() and undefined == "raise":
        raise UndefinedDensityError(
            f"envelope below {ENVELOPE_FLOOR:g} at dx = {dx[bad][:5].tolist()}"
        )
    with np.errstate(invalid="ignore", divide="ignore"):
        b = np.where(bad, np.nan + 0j, (a_nl - a_lin) / a_ref)
        ratio = np.where(bad, np.nan + 0j, a_nl / a_lin)
    z_nl = psi_nl.amplitude(c, c)
    z_lin = psi_lin.amplitude(c, c)
    if abs(z_lin) < ENVELOPE_FLOOR:
        raise UndefinedDensityError("linear coincidence amplitude vanishes at the slice centre")
    phase = float(np.angle(z_nl / z_lin))
    return NonlinearCorrection(dx, b, ratio, phase, c)


@dataclass(frozen=True)
class Extrapolation:
    """Linear fit ``phase = intercept + slope / x_pulse``."""

    intercept: float
    slope: float
    max_residual: float
    widths: tuple[float, ...]


def extrapolate_collimated(widths, phases) -> Extrapolation:
    """Least-squares line in ``1 / x_pulse``; the intercept is the collimated estimate.

    At least three distinct widths are required.
    """
    w = np.asarray(widths, dtype=float)
    p = np.asarray(phases, dtype=float)
    if w.shape != p.shape or w.ndim != 1:
        raise ValidationError("widths and phases must be 1-D arrays of equal length")
    if np.unique(w).size < 3 or np.any(w <= 0):
        raise ValidationError("extrapolation needs at least three distinct positive widths")
    # unwrap against the first value so a fit never straddles the branch cut
    p = p[0] + np.angle(np.exp(1j * (p - p[0])))
    slope, icpt = np.polyfit(1.0 / w, p, 1)
    res = p - (icpt + slope / w)
    return Extrapolation(float(icpt), float(slope), float(np.max(np.abs(res))), tuple(w.tolist()))


# -- window errors -------------------------------------------------------------
def _window(state: TwoPhotonState, x_pulse: float):
    """Packed indices and weights of transmitted pairs with ``|x1 - x2| <= x_pulse``."""
    qr = _last_qubit(state)
    n = state.n
    half = int(math.floor(x_pulse))
    idx, wts = [], []
    from .kernels import row_offset

    for a in range(qr + 1, n):
        hi = min(n, a + half + 1)
        r = row_offset(a, n)
        cols = np.arange(r, r + hi - a)
        w = np.full(cols.size, 2.0)
        w[0] = 1.0
        idx.append(cols)
        wts.append(w)
    if not idx:
        raise UndefinedDensityError("empty integration window")
    return np.concatenate(idx), np.concatenate(wts)


def overlap_error(
    psi_out: TwoPhotonState,
    nonlinear_phase_collimated: float,
    psi_lin: TwoPhotonState,
    x_pulse: float,
) -> float:
    """Overlap error ``1 - |<out|ideal>| / A`` over the transmitted window.

    The ideal state is ``psi_lin`` multiplied by ``exp(i phase)``; the window
    holds transmitted pairs with separation at most ``x_pulse``.
    """
    _check_pair(psi_out, psi_lin)
    idx, w = _window(psi_out, x_pulse)
    out = psi_out.data[idx]
    ideal = psi_lin.data[idx] * np.exp(1j * nonlinear_phase_collimated)
    n_out = float(np.sum(w * np.abs(out) ** 2))
    n_id = float(np.sum(w * np.abs(ideal) ** 2))
    if n_out <= 0 or n_id <= 0:
        raise UndefinedDensityError("zero norm inside the error window")
    ov = abs(np.sum(w * np.conj(out) * ideal))
    return float(min(1.0, max(0.0, 1.0 - ov / math.sqrt(n_out * n_id))))


def phase_error(
    psi_out: TwoPhotonState,
    nonlinear_phase_collimated: float,
    psi_lin: TwoPhotonState,
    x_pulse: float,
) -> float:
    """Density-weighted mean of ``|arg(psi_out / psi_lin) - phase|`` over the window.

    The weight is the linear reference density ``|psi_lin|^2``.
    """
    _check_pair(psi_out, psi_lin)
    idx, w = _window(psi_out, x_pulse)
    lin = psi_lin.data[idx]
    dens = w * np.abs(lin) ** 2
    keep = np.abs(lin) >= ENVELOPE_FLOOR
    if not keep.any() or dens[keep].sum() <= 0:
        raise UndefinedDensityError("zero density inside the error window")
    dev = np.angle(psi_out.data[idx][keep] / lin[keep] * np.exp(-1j * nonlinear_phase_collimated))
    return float(np.sum(dens[keep] * np.abs(dev)) / np.sum(dens[keep]))


# -- transmitted and reflected probabilities ----------------------------------------
def transmitted_probability(state: TwoPhotonState) -> float:
    """Probability that both photons end up right of the last qubit."""
    return state.region_probability(_last_qubit(state) + 1, state.n)


def reflected_probability(state: TwoPhotonState) -> float:
    """Probability that both photons end up left of the first qubit."""
    return state.region_probability(0, _first_qubit(state))


def reflection_density(psi_nl: TwoPhotonState, psi_lin: TwoPhotonState) -> float:
    """Excess loss of transmitted pairs, ``1 - P_T(nl) / P_T(lin)``."""
    _check_pair(psi_nl, psi_lin)
    p_lin = transmitted_probability(psi_lin)
    if p_lin <= 0:
        raise UndefinedDensityError("linear run transmits nothing")
    return 1.0 - transmitted_probability(psi_nl) / p_lin


def reflected_slice(psi_nl: TwoPhotonState, psi_free: TwoPhotonState, dx) -> np.ndarray:
    """Both-reflected density ``|psi_nl|^2 / |psi_free|^2`` along the anti-diagonal.

    The slice passes through the mirror image of the freely propagated
    packet centre about the qubits.
    """
    plan = psi_nl.meta["plan"]
    model = psi_nl.meta["model"]
    x = np.arange(_last_qubit(psi_free) + 1, psi_free.n)
    c_free = int(x[np.argmax(np.abs(psi_free.amplitude(x, x)))])
    mirror = 2 * plan.middle_site - c_free
    dx = np.atleast_1d(np.asarray(dx, dtype=int))
    x1, x2 = slice_sites(mirror, dx)
    ok = (x1 >= 0) & (x2 < model.qubit_sites[0])
    out = np.full(dx.shape, np.nan)
    # free envelope sampled at the mirrored pair, which it occupies by symmetry
    m1, m2 = 2 * plan.middle_site - x2, 2 * plan.middle_site - x1
    env = np.abs(psi_free.amplitude(m1[ok], m2[ok])) ** 2
    with np.errstate(invalid="ignore", divide="ignore"):
        out[ok] = np.abs(psi_nl.amplitude(x1[ok], x2[ok])) ** 2 / env
    return out
