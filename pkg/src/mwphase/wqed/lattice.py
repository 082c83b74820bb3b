"""Tight-binding discretization of the three-qubit waveguide.

The waveguide is a chain of ``N`` sites with hopping ``J`` (band
``-2J cos k``, group velocity ``v = 2J sin k``).  Each qubit is a two-level
site coupled to one chain site with strength ``V_j``.  Qubits are a quarter
carrier wavelength apart, so their propagation phases are exactly those of
the continuum model at the carrier momentum ``k0``.

Energies are in units of the hopping.  A photon at the carrier has energy
``eps(k0)`` and the qubits are placed at ``Omega = eps(k0) - delta`` so the
detuning ``delta = v k - Omega`` enters through the qubit frequency while
the carrier (and with it the spacing phase) stays fixed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.optimize import least_squares

from ..errors import CalibrationError, ValidationError
from .analytic import full_transmission_detuning, single_photon_s21
from .kernels import Geometry

ALLOWED_K0 = {2: math.pi / 2, 4: math.pi / 4, 8: math.pi / 8}


@dataclass(frozen=True)
class LatticeConfig:
    """User-facing lattice settings.

    Attributes
    ----------
    n_sites : int
        Chain length N (at least 256).
    hopping : float
        J; all energies are measured in this unit.
    k0 : float
        Carrier momentum in radians per site, one of pi/2, pi/4, pi/8.
    gamma_over_v : float
        Outer-qubit decay rate divided by the group velocity at ``k0``.
    gamma_ratio : float
        Middle-qubit rate over the outer rate.
    detuning_over_gamma : float or None
        Carrier detuning in units of Gamma; ``None`` selects ``delta_f^+``.
    hardcore : bool
        Two-level qubits (True) or linear bosonic sites (False).
    middle_site : int or None
        Site of the middle qubit; defaults to the chain centre.
    """

    n_sites: int = 1024
    hopping: float = 1.0
    k0: float = math.pi / 2
    gamma_over_v: float = 0.05
    gamma_ratio: float = 1.0
    detuning_over_gamma: float | None = None
    hardcore: bool = True
    middle_site: int | None = None


@dataclass(frozen=True)
class LatticeModel:
    """A fully specified lattice Hamiltonian in the one- and two-excitation sectors."""

    site_count: int
    hopping: float
    carrier_momentum: float
    qubit_sites: tuple[int, int, int]
    couplings: tuple[float, float, float]
    omega: tuple[float, float, float]
    hardcore: bool
    gamma_rate: float
    gamma_ratio: float
    detuning: float
    calibrated: bool = False
    _geometry: Geometry | None = field(default=None, init=False, repr=False, compare=False)

    @property
    def velocity(self) -> float:
        return 2.0 * self.hopping * math.sin(self.carrier_momentum)

    @property
    def carrier_energy(self) -> float:
        return band_energy(self.carrier_momentum, self.hopping)

    @property
    def spacing(self) -> int:
        return self.qubit_sites[1] - self.qubit_sites[0]

    def geometry(self) -> Geometry:
        """Kernel geometry (cached)."""
        if self._geometry is None:
            geo = Geometry(
                n=self.site_count,
                hop=self.hopping,
                sites=np.array(self.qubit_sites),
                v=np.array(self.couplings),
                om=np.array(self.omega),
                hardcore=self.hardcore,
            )
            object.__setattr__(self, "_geometry", geo)
        return self._geometry

    def with_hardcore(self, hardcore: bool) -> "LatticeModel":
        return replace(self, hardcore=hardcore)

    def with_detuning(self, detuning: float) -> "LatticeModel":
        om = self.carrier_energy - detuning
        return replace(self, detuning=float(detuning), omega=(om, om, om))

    def with_couplings(self, couplings, calibrated: bool = True) -> "LatticeModel":
        return replace(self, couplings=tuple(float(c) for c in couplings), calibrated=calibrated)

    def resized(self, n_sites: int, middle_site: int) -> "LatticeModel":
        """Same physics on a chain of different length."""
        s = self.spacing
        return replace(
            self,
            site_count=int(n_sites),
            qubit_sites=(middle_site - s, middle_site, middle_site + s),
        )


def band_energy(k, hopping: float = 1.0):
    return -2.0 * hopping * np.cos(k)


def build_lattice_model(cfg: LatticeConfig) -> LatticeModel:
    """Construct the lattice model with analytic starting couplings.

    Couplings are set to ``sqrt(Gamma_j v / 2)`` as a starting point and
    flagged as uncalibrated; :func:`calibrate_coupling` refines them.
    """
    if cfg.n_sites < 256:
        raise ValidationError(f"lattice needs at least 256 sites, got {cfg.n_sites}")
    if cfg.hopping <= 0:
        raise ValidationError("hopping must be positive")
    wavelength = 2.0 * math.pi / cfg.k0
    spacing = wavelength / 4.0
    if abs(spacing - round(spacing)) > 1e-9 or round(spacing) not in (1, 2, 4):
        raise ValidationError(
            f"k0 = {cfg.k0!r} does not give an integer quarter-wavelength spacing; "
            "choose pi/2, pi/4 or pi/8"
        )
    if cfg.gamma_over_v <= 0:
        raise ValidationError("gamma_over_v must be positive")
    s = int(round(spacing))
    mid = cfg.n_sites // 2 if cfg.middle_site is None else int(cfg.middle_site)
    if not (s <= mid < cfg.n_sites - s):
        raise ValidationError("qubits must lie inside the chain")
    v = 2.0 * cfg.hopping * math.sin(cfg.k0)
    gamma_rate = cfg.gamma_over_v * v
    if cfg.detuning_over_gamma is None:
        delta, _ = full_transmission_detuning(cfg.gamma_ratio, gamma_rate)
    else:
        delta = cfg.detuning_over_gamma * gamma_rate
    vside = math.sqrt(gamma_rate * v / 2.0)
    om = float(band_energy(cfg.k0, cfg.hopping)) - delta
    return LatticeModel(
        site_count=cfg.n_sites,
        hopping=cfg.hopping,
        carrier_momentum=cfg.k0,
        qubit_sites=(mid - s, mid, mid + s),
        couplings=(vside, math.sqrt(cfg.gamma_ratio) * vside, vside),
        omega=(om, om, om),
        hardcore=cfg.hardcore,
        gamma_rate=gamma_rate,
        gamma_ratio=cfg.gamma_ratio,
        detuning=delta,
    )


def single_excitation_hamiltonian(
    n: int, hopping: float, sites, couplings, omega
) -> sp.csr_matrix:
    """One-excitation Hamiltonian: ``n`` chain sites followed by the qubits."""
    sites = np.asarray(sites, dtype=int)
    nq = sites.size
    off = -hopping * np.ones(n - 1)
    rows = [np.arange(n - 1), np.arange(1, n)]
    cols = [np.arange(1, n), np.arange(n - 1)]
    vals = [off, off]
    q = n + np.arange(nq)
    rows += [sites, q, q]
    cols += [q, sites, q]
    vals += [np.asarray(couplings, float), np.asarray(couplings, float), np.asarray(omega, float)]
    return sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n + nq, n + nq),
    ).tocsr()


def model_single_hamiltonian(model: LatticeModel) -> sp.csr_matrix:
    return single_excitation_hamiltonian(
        model.site_count, model.hopping, model.qubit_sites, model.couplings, model.omega
    )


def stationary_s21(
    n: int, hopping: float, sites, couplings, omega, k: float
) -> complex:
    """Transmission amplitude at momentum ``k`` of a chain segment between ideal leads.

    Semi-infinite leads are attached to both chain ends through their exact
    retarded self-energy ``-J exp(ik)``; the result is normalized by the
    same propagator without qubits, so only the scattering phase remains.
    """
    e = float(band_energy(k, hopping))
    h = single_excitation_hamiltonian(n, hopping, sites, couplings, omega).tolil()
    sigma = -hopping * np.exp(1j * k)
    h = h.astype(complex)
    h[0, 0] += sigma
    h[n - 1, n - 1] += sigma
    a = (e * sp.identity(h.shape[0], dtype=complex, format="csc") - h.tocsc())
    src = np.zeros(h.shape[0], dtype=complex)
    src[0] = 1.0
    g = spla.spsolve(a, src)
    # empty chain between the same leads: G_{n-1,0} = exp(ik(n-1)) / (i v)
    g0 = np.exp(1j * k * (n - 1)) / (1j * 2.0 * hopping * math.sin(k))
    return complex(g[n - 1] / g0)


def lattice_s21(model: LatticeModel, delta) -> np.ndarray:
    """Single-photon transmission of the lattice model at carrier ``k0``.

    ``delta`` (scalar or array) is applied through the qubit frequency.
    """
    ds = np.atleast_1d(np.asarray(delta, dtype=float))
    out = np.empty(ds.shape, dtype=complex)
    e0 = model.carrier_energy
    for i, d in enumerate(ds):
        om = (e0 - d,) * 3
        out[i] = stationary_s21(
            model.site_count, model.hopping, model.qubit_sites, model.couplings, om,
            model.carrier_momentum,
        )
    return out if np.ndim(delta) else out[0]


def one_qubit_lineshape(delta, gamma_rate: float):
    """Transmission past one emitter of total decay rate ``gamma_rate``."""
    d = np.asarray(delta, dtype=float)
    return d / (d + 0.5j * gamma_rate)


def calibrate_coupling(
    model: LatticeModel,
    gamma_target: float | None = None,
    *,
    n_points: int = 61,
    tolerance: float = 5e-3,
) -> LatticeModel:
    """Fit the side-qubit coupling to the one-emitter lineshape.

    Only the left qubit is kept on the chain; its coupling ``V`` is fitted
    by least squares so that the lattice transmission matches
    ``delta / (delta + i Gamma/2)`` on ``[-3 Gamma, 3 Gamma]``.  The middle
    qubit then gets ``sqrt(gamma) V``.

    Returns
    -------
    LatticeModel
        Copy of ``model`` with calibrated couplings.

    Raises
    ------
    CalibrationError
        If the maximum deviation exceeds ``tolerance``.
    """
    G = model.gamma_rate if gamma_target is None else float(gamma_target)
    if G <= 0:
        raise ValidationError("gamma_target must be positive")
    ds = np.linspace(-3.0 * G, 3.0 * G, n_points)
    target = one_qubit_lineshape(ds, G)
    e0 = model.carrier_energy
    site = model.qubit_sites[0]
    k = model.carrier_momentum

    def lattice(vc: float) -> np.ndarray:
        return np.array([
            stationary_s21(model.site_count, model.hopping, [site], [vc], [e0 - d], k)
            for d in ds
        ])

    def resid(p):
        diff = lattice(p[0]) - target
        return np.concatenate([diff.real, diff.imag])

    # crude start: a quarter of the hopping scale times sqrt(G)
    v0 = 0.5 * math.sqrt(G * model.hopping)
    fit = least_squares(resid, [v0], bounds=([0.0], [np.inf]), xtol=1e-14, ftol=1e-14, gtol=1e-14)
    vside = float(fit.x[0])
    err = float(np.max(np.abs(lattice(vside) - target)))
    if not err <= tolerance:
        raise CalibrationError(f"coupling fit residual {err:.3g} above {tolerance:.3g}", err)
    return model.with_couplings((vside, math.sqrt(model.gamma_ratio) * vside, vside))


def analytic_reference(model: LatticeModel, delta) -> np.ndarray:
    return single_photon_s21(delta, model.gamma_rate, model.gamma_ratio)
