"""Flux-crosstalk compensation for the SQUID bias lines.

Every bias line threads flux into every SQUID.  With the mutual-inductance
matrix ``M`` (``M[i, j]`` is the flux through SQUID ``i`` per ampere in line
``j``) the currents that realize target fluxes ``Phi`` solve ``M I = Phi``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import PHI0
from .errors import NonInvertibleError, ValidationError

MAX_CONDITION = 1e12
RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class MatrixDiagnostics:
    """Invertibility report for an inductance matrix.

    Attributes
    ----------
    determinant : float
    condition : float
        2-norm condition number (``inf`` when singular).
    dominance : ndarray
        Per-row ratio ``|M_ii| / sum_{j != i} |M_ij|`` (``inf`` for a
        diagonal row).
    singular : bool
        True when the matrix cannot be inverted to the required accuracy.
    """

    determinant: float
    condition: float
    dominance: np.ndarray
    singular: bool


def _as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
        raise ValidationError(f"inductance matrix must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError("inductance matrix has non-finite entries")
    return a


def validate_matrix(m) -> MatrixDiagnostics:
    """Determinant, condition number and row dominance of ``m``."""
    a = _as_matrix(m)
    det = float(np.linalg.det(a))
    sv = np.linalg.svd(a, compute_uv=False)
    cond = math.inf if sv[-1] == 0 else float(sv[0] / sv[-1])
    diag = np.abs(np.diag(a))
    off = np.sum(np.abs(a), axis=1) - diag
    with np.errstate(divide="ignore", invalid="ignore"):
        dom = np.where(off > 0, diag / np.where(off > 0, off, 1.0), np.inf)
    singular = not (cond < MAX_CONDITION) or det == 0.0
    return MatrixDiagnostics(det, cond, dom, singular)


def to_webers(flux, unit: str = "phi0") -> np.ndarray:
    """Convert fluxes given in ``"phi0"`` or ``"wb"`` to webers."""
    f = np.asarray(flux, dtype=float)
    u = unit.lower()
    if u in ("phi0", "Φ0"):
        return f * PHI0
    if u in ("wb", "weber", "webers"):
        return f
    raise ValidationError(f"unknown flux unit {unit!r}; use 'phi0' or 'wb'")


def compensation_currents(m, target_flux, unit: str = "wb") -> np.ndarray:
    """Bias currents (A) producing ``target_flux`` in every SQUID.

    Parameters
    ----------
    m : array_like, shape (n, n)
        Mutual inductances in Wb/A.
    target_flux : array_like, shape (n,)
        Desired fluxes, in webers (``unit="wb"``) or flux quanta (``"phi0"``).

    Raises
    ------
    NonInvertibleError
        If the condition number is not below ``1e12`` or the solve leaves a
        relative residual above ``1e-10``.
    """
    a = _as_matrix(m)
    phi = to_webers(target_flux, unit)
    if phi.shape != (a.shape[0],):
        raise ValidationError(f"target must have {a.shape[0]} entries, got shape {phi.shape}")
    diag = validate_matrix(a)
    if diag.singular:
        raise NonInvertibleError(
            f"inductance matrix is singular or ill-conditioned (condition {diag.condition:.3g})",
            diag.condition,
        )
    cur = np.linalg.solve(a, phi)
    res = np.linalg.norm(a @ cur - phi)
    scale = max(np.linalg.norm(phi), np.finfo(float).tiny)
    if np.linalg.norm(phi) > 0 and res / scale > RESIDUAL_TOL:
        raise NonInvertibleError(f"solve residual {res / scale:.3g} too large", diag.condition)
    return cur


def realized_flux(m, currents) -> np.ndarray:
    """Fluxes (Wb) threaded by the given line currents."""
    return _as_matrix(m) @ np.asarray(currents, dtype=float)


def example_matrix() -> np.ndarray:
    """SYNTHETIC 3x3 mutual-inductance matrix (Wb/A) for demonstrations only.

    Diagonal couplings of about one flux quantum per milliampere with
    crosstalk of a few to ten percent; these are not measured values.
    """
    d = PHI0 / 1e-3
    return d * np.array(
        [
            [1.00, 0.08, 0.03],
            [0.10, 1.05, 0.09],
            [0.02, 0.07, 0.97],
        ]
    )
