"""Two-port chain-matrix (ABCD) algebra and conversion to S-parameters.

Conventions
-----------
Matrices follow the usual engineering form in which a lossless line of
electrical length ``phi`` is ``[[cos phi, i Z0 sin phi], [i sin phi / Z0,
cos phi]]`` and therefore transmits with ``s21 = exp(-i phi)``.  The SQUID
module works in the opposite time convention and obtains its amplitudes as
complex conjugates of the ones computed here (see :mod:`mwphase.squid`).

Open circuits
-------------
A matrix is stored as a raw 2x2 array ``M`` together with a scalar weight
``w``; the physical chain matrix is ``M / w``.  Ordinary elements have
``w = 1``.  A series element whose impedance diverges (a parallel LC at
resonance) is stored as ``M = [[0, 1], [0, 0]]`` with ``w = 0``, which keeps
cascades finite and gives ``s21 = 0`` without producing NaN.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidElementError, SingularNetworkError, ValidationError

RESONANCE_TOL = 1e-12


def _finite(z: complex) -> bool:
    return math.isfinite(z.real) and math.isfinite(z.imag)


@dataclass(frozen=True)
class TwoPortABCD:
    """Chain matrix of a reciprocal two-port.

    Attributes
    ----------
    raw : tuple of complex
        Entries ``(a, b, c, d)`` of the unnormalized matrix.
    weight : complex
        Normalization; the physical matrix is ``raw / weight``.
    """

    raw: tuple[complex, complex, complex, complex]
    weight: complex = 1.0

    @classmethod
    def from_entries(cls, a, b, c, d) -> "TwoPortABCD":
        return cls((complex(a), complex(b), complex(c), complex(d)), 1.0)

    def _entry(self, i: int) -> complex:
        if self.weight == 0:
            return complex(math.inf, 0.0) if self.raw[i] != 0 else complex(math.nan, 0.0)
        return self.raw[i] / self.weight

    @property
    def a(self) -> complex:
        return self._entry(0)

    @property
    def b(self) -> complex:
        return self._entry(1)

    @property
    def c(self) -> complex:
        return self._entry(2)

    @property
    def d(self) -> complex:
        return self._entry(3)

    @property
    def is_open(self) -> bool:
        """True when the chain contains an exact open circuit."""
        return self.weight == 0

    def matrix(self) -> np.ndarray:
        """Physical 2x2 matrix (raises for an open circuit)."""
        if self.is_open:
            raise SingularNetworkError("open-circuit chain has no finite ABCD matrix")
        a, b, c, d = self.raw
        return np.array([[a, b], [c, d]], dtype=complex) / self.weight

    def determinant(self) -> complex:
        """``a d - b c`` of the physical matrix; for an open chain the raw ratio is reported."""
        a, b, c, d = self.raw
        det = a * d - b * c
        if self.is_open:
            return det
        return det / self.weight**2

    def __matmul__(self, other: "TwoPortABCD") -> "TwoPortABCD":
        a1, b1, c1, d1 = self.raw
        a2, b2, c2, d2 = other.raw
        raw = (a1 * a2 + b1 * c2, a1 * b2 + b1 * d2, c1 * a2 + d1 * c2, c1 * b2 + d1 * d2)
        return TwoPortABCD(raw, self.weight * other.weight)


@dataclass(frozen=True)
class SMatrix:
    """Scattering parameters referenced to a real impedance ``z0``."""

    s11: complex
    s21: complex
    s12: complex
    s22: complex
    z0: float

    def power_balance(self) -> float:
        """``|s11|^2 + |s21|^2`` (unity for a lossless network)."""
        return abs(self.s11) ** 2 + abs(self.s21) ** 2


IDENTITY = TwoPortABCD((1.0 + 0j, 0j, 0j, 1.0 + 0j), 1.0)


def abcd_series(z: complex) -> TwoPortABCD:
    """Series impedance ``z`` (ohms)."""
    z = complex(z)
    if not _finite(z):
        raise InvalidElementError(f"series impedance must be finite, got {z!r}")
    return TwoPortABCD((1.0 + 0j, z, 0j, 1.0 + 0j), 1.0)


def abcd_shunt(y: complex) -> TwoPortABCD:
    """Shunt admittance ``y`` (siemens)."""
    y = complex(y)
    if not _finite(y):
        raise InvalidElementError(f"shunt admittance must be finite, got {y!r}")
    return TwoPortABCD((1.0 + 0j, 0j, y, 1.0 + 0j), 1.0)


def abcd_line(phi: float, z0: float) -> TwoPortABCD:
    """Lossless line of electrical length ``phi`` and impedance ``z0``."""
    if not (z0 > 0 and math.isfinite(z0)):
        raise ValidationError(f"line impedance must be positive, got {z0!r}")
    if not math.isfinite(phi):
        raise InvalidElementError("electrical length must be finite")
    c, s = math.cos(phi), math.sin(phi)
    return TwoPortABCD((complex(c), 1j * z0 * s, 1j * s / z0, complex(c)), 1.0)


def abcd_series_lc(l: float, cap: float, omega: float) -> TwoPortABCD:
    """Parallel LC (a SQUID in the linear regime) inserted in series with the line.

    The impedance is ``i omega L / (1 - omega^2 L C)``.  The element is
    stored as ``[[1 - x, i omega L], [0, 1 - x]]`` with weight ``1 - x``
    (``x = omega^2 L C``), so exact resonance becomes an open circuit.
    """
    if not (l >= 0 and cap >= 0 and omega > 0) or not all(map(math.isfinite, (l, cap, omega))):
        raise InvalidElementError("series LC needs finite l >= 0, cap >= 0 and omega > 0")
    x = omega * omega * l * cap
    one_minus = 1.0 - x
    zl = 1j * omega * l
    if abs(one_minus) < RESONANCE_TOL:
        return TwoPortABCD((0j, zl, 0j, 0j), 0.0)
    return TwoPortABCD((1.0 + 0j, zl / one_minus, 0j, 1.0 + 0j), 1.0)


def cascade(elements: Sequence[TwoPortABCD] | Iterable[TwoPortABCD]) -> TwoPortABCD:
    """Product of chain matrices in propagation order (input port first)."""
    elements = list(elements)
    if not elements:
        raise ValidationError("cascade needs at least one element")
    out = elements[0]
    for m in elements[1:]:
        out = out @ m
    return out


def s_params(m: TwoPortABCD, z0: float) -> SMatrix:
    """Convert a chain matrix to S-parameters with equal port impedances ``z0``."""
    if not (z0 > 0 and math.isfinite(z0)):
        raise ValidationError(f"reference impedance must be positive, got {z0!r}")
    a, b, c, d = m.raw
    w = m.weight
    den = a + b / z0 + c * z0 + d
    scale = max(abs(a), abs(b) / z0, abs(c) * z0, abs(d), abs(w))
    if scale == 0 or abs(den) <= 1e-300 or abs(den) < 1e-15 * scale:
        raise SingularNetworkError("S-parameter denominator vanishes")
    det = a * d - b * c  # = w^2 for reciprocal chains
    s11 = (a + b / z0 - c * z0 - d) / den
    s22 = (-a + b / z0 - c * z0 + d) / den
    s21 = 2.0 * w / den
    s12 = 2.0 * det / (w * den) if w != 0 else 0j
    return SMatrix(complex(s11), complex(s21), complex(s12), complex(s22), float(z0))


def matched_line_s21(phi: float) -> complex:
    """Transmission of a bare matched line in this module's convention."""
    return cmath.exp(-1j * phi)
