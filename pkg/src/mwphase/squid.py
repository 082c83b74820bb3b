"""Three-SQUID tunable phase shifter.

Each SQUID is a linear parallel LC element (Josephson inductance ``L``,
shunt capacitance ``C``) inserted in series with a line of impedance
``Z0``.  Neighbouring SQUIDs are separated by line sections of electrical
length ``phi``; the two outer SQUIDs share the inductance ``L1`` and the
middle one has ``L2``.

Time convention
---------------
Amplitudes here use the ``exp(-i omega t)`` convention, in which a bare
matched line of length ``phi`` transmits with ``exp(+i phi)`` and the closed
form below carries ``exp(2 i phi)`` for the two line sections.  The chain
matrices of :mod:`mwphase.network` use the engineering ``exp(+i omega t)``
convention, so the network-cascade route returns the complex conjugate of
its S-parameters (all circuit parameters are real).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .constants import PHI0, TWO_PI
from .errors import (
    ComputationError,
    DegenerateDesignError,
    DivergentInductanceError,
    InfeasibleInductanceError,
    NoCurveError,
    ValidationError,
)
from .network import RESONANCE_TOL, abcd_line, abcd_series_lc, cascade, s_params

DIVERGENCE_TOL = 1e-12
DESIGN_TOL = 1e-12


@dataclass(frozen=True)
class SquidDevice:
    """Circuit parameters of the phase shifter (SI units).

    Attributes
    ----------
    ic1, ic2 : float
        Critical currents of the outer SQUIDs and of the middle SQUID (A).
    cap : float
        Shunt capacitance of every SQUID (F).
    z0 : float
        Line impedance (ohm).
    phi_line : float
        Electrical length of one inter-SQUID line section at ``omega`` (rad).
    omega : float
        Drive angular frequency (rad/s).
    """

    ic1: float
    ic2: float
    cap: float
    z0: float = 50.0
    phi_line: float = 0.0
    omega: float = TWO_PI * 6.3e9

    def __post_init__(self):
        for name in ("ic1", "ic2", "cap", "z0", "omega"):
            val = getattr(self, name)
            if not (isinstance(val, (int, float)) and math.isfinite(val) and val > 0):
                raise ValidationError(f"{name} must be positive and finite, got {val!r}")
        if not math.isfinite(self.phi_line):
            raise ValidationError("phi_line must be finite")

    @classmethod
    def from_frequency(cls, freq_hz: float, **kw) -> "SquidDevice":
        return cls(omega=TWO_PI * freq_hz, **kw)

    @property
    def freq(self) -> float:
        return self.omega / TWO_PI

    @property
    def lmin1(self) -> float:
        return minimum_inductance(self.ic1)

    @property
    def lmin2(self) -> float:
        return minimum_inductance(self.ic2)

    def with_phi(self, phi_line: float) -> "SquidDevice":
        return replace(self, phi_line=float(phi_line))


@dataclass(frozen=True)
class PhaseShifterDesign:
    """Operating point realizing a phase shift ``theta`` at full transmission.

    Fluxes are in units of the flux quantum on the principal branch
    ``[0, 0.5]``; they are NaN when the design is infeasible.
    """

    theta: float
    l1: float
    l2: float
    flux1: float
    flux2: float
    feasible: bool
    reason: str = ""


# -- Josephson inductance -------------------------------------------------
def minimum_inductance(ic: float) -> float:
    """Zero-flux SQUID inductance ``Phi0 / (4 pi Ic)``."""
    if not ic > 0:
        raise ValidationError("critical current must be positive")
    return PHI0 / (4.0 * math.pi * ic)


def josephson_inductance(ic: float, flux):
    """SQUID inductance ``Phi0 / (4 pi Ic |cos(pi flux)|)``; ``flux`` in units of Phi0.

    Raises
    ------
    DivergentInductanceError
        At half-integer flux, where the cosine vanishes.
    """
    lmin = minimum_inductance(ic)
    f = np.asarray(flux, dtype=float)
    c = np.abs(np.cos(np.pi * f))
    if np.any(c < DIVERGENCE_TOL):
        raise DivergentInductanceError("Josephson inductance diverges at half-integer flux")
    out = lmin / c
    return float(out) if out.ndim == 0 else out


def flux_from_inductance(ic: float, l: float) -> float:
    """Principal-branch flux in ``[0, 0.5]`` giving inductance ``l``.

    Raises
    ------
    InfeasibleInductanceError
        If ``l`` is below the SQUID minimum ``Phi0 / (4 pi Ic)``.
    """
    lmin = minimum_inductance(ic)
    if not math.isfinite(l):
        if l > 0:
            return 0.5
        raise ValidationError("inductance must be finite")
    if l < lmin * (1.0 - 1e-13):
        raise InfeasibleInductanceError(
            f"inductance {l:.6g} H is below the SQUID minimum {lmin:.6g} H", lmin
        )
    return math.acos(min(1.0, lmin / l)) / math.pi


# -- transmission --------------------------------------------------------
def _closed_form(l1, l2, cap, z0, omega, phi):
    e = np.exp(2j * phi)
    w = omega
    u1 = cap * l1 * w * w - 1.0
    u2 = cap * l2 * w * w - 1.0
    f = 8.0 * z0**3 * e * u2 * u1 * u1
    g = (
        4.0 * z0 * z0 * u2 * u1
        + l2 * l1 * w * w * (e - 1.0)
        + 2j * w * z0 * (cap * l2 * l1 * w * w * (2.0 + e) - l2 - l1 * (1.0 + e))
    ) * (2.0 * z0 * u1 - 1j * l1 * w * (e - 1.0))
    return f, g


def s21_closed_form(l1, l2, dev: SquidDevice):
    """Transmission ``f / g`` of the chain from its closed-form numerator and denominator.

    Accepts scalars or broadcastable arrays for ``l1`` and ``l2``.

    Raises
    ------
    ComputationError
        When ``|g|`` falls below ``1e-300``.
    """
    f, g = _closed_form(np.asarray(l1, float), np.asarray(l2, float), dev.cap, dev.z0,
                        dev.omega, dev.phi_line)
    if np.any(np.abs(g) < 1e-300):
        raise ComputationError("closed-form denominator vanishes")
    out = f / g
    return complex(out) if np.ndim(out) == 0 else out


def chain_elements(l1: float, l2: float, dev: SquidDevice) -> list:
    """Chain matrices of [SQUID, line, SQUID, line, SQUID] in propagation order."""
    s1 = abcd_series_lc(l1, dev.cap, dev.omega)
    s2 = abcd_series_lc(l2, dev.cap, dev.omega)
    ln = abcd_line(dev.phi_line, dev.z0)
    return [s1, ln, s2, ln, s1]


def s_matrix_cascade(l1: float, l2: float, dev: SquidDevice):
    """S-parameters of the chain via the network cascade, in this module's convention."""
    s = s_params(cascade(chain_elements(l1, l2, dev)), dev.z0)
    return replace(s, s11=s.s11.conjugate(), s21=s.s21.conjugate(),
                   s12=s.s12.conjugate(), s22=s.s22.conjugate())


def s21_cascade(l1: float, l2: float, dev: SquidDevice) -> complex:
    """Independent evaluation of ``S21`` by multiplying chain matrices."""
    return s_matrix_cascade(l1, l2, dev).s21


def _chain_arrays(l1, l2, cap, z0, omega, phi):
    """Vectorized cascade returning ``(s11, s21)`` in this module's convention.

    ``l = inf`` is treated as the capacitor-only limit of a fully frustrated
    SQUID; exact LC resonance is an open circuit.
    """
    l1 = np.asarray(l1, float)
    l2 = np.asarray(l2, float)

    def element(l):
        # raw [[u, z], [0, u]] with weight u; physical impedance z / u
        inf = np.isinf(l)
        lf = np.where(inf, 0.0, l)
        u = 1.0 - omega * omega * lf * cap
        z = 1j * omega * lf
        u = np.where(np.abs(u) < RESONANCE_TOL, 0.0, u)
        z = np.where(inf, -1j / (omega * cap), z)
        u = np.where(inf, 1.0, u)
        zero = np.zeros_like(z)
        return [u + 0j, z, zero, u + 0j], u

    def mul(m1, m2):
        a1, b1, c1, d1 = m1
        a2, b2, c2, d2 = m2
        return [a1 * a2 + b1 * c2, a1 * b2 + b1 * d2, c1 * a2 + d1 * c2, c1 * b2 + d1 * d2]

    cs, sn = math.cos(phi), math.sin(phi)
    line = [cs + 0j, 1j * z0 * sn, 1j * sn / z0, cs + 0j]
    e1, w1 = element(l1)
    e2, w2 = element(l2)
    m = mul(mul(mul(mul(e1, line), e2), line), e1)
    a, b, c, d = m
    den = a + b / z0 + c * z0 + d
    s21 = 2.0 * w1 * w1 * w2 / den
    s11 = (a + b / z0 - c * z0 - d) / den
    return np.conj(s11), np.conj(s21)


# -- design -----------------------------------------------------------------
def design_inductances(theta: float, dev: SquidDevice) -> tuple[float, float]:
    """Inductances ``(L1, L2)`` giving unit transmission with phase ``2 phi + theta``.

    Negative values are returned as computed; feasibility is judged by
    :func:`design_phase_shifter`.

    Raises
    ------
    DegenerateDesignError
        When either denominator is below ``1e-12`` in magnitude.
    """
    if not math.isfinite(theta):
        raise ValidationError("theta must be finite")
    z0, c, w, p = dev.z0, dev.cap, dev.omega, dev.phi_line
    s = math.sin(0.5 * theta)
    den1 = 2.0 * c * w * z0 * s - math.cos(0.5 * theta + 2.0 * p) + math.cos(0.5 * theta)
    den2 = 2.0 * c * w * z0 * (math.sin(theta + 2.0 * p) - math.sin(2.0 * p)) + math.cos(2.0 * p) - 1.0
    num1 = 2.0 * z0 * s
    num2 = 4.0 * z0 * s * math.cos(0.5 * theta + 2.0 * p)
    if abs(den1) < DESIGN_TOL or abs(den2) < DESIGN_TOL:
        if num1 == 0.0 and num2 == 0.0:
            # theta = 0 (mod 2 pi): the trivial design with no SQUID inductance
            return 0.0, 0.0
        raise DegenerateDesignError(f"design denominator vanishes at theta = {theta!r}")
    return num1 / (w * den1), num2 / (w * den2)


def design_phase_shifter(theta: float, dev: SquidDevice) -> PhaseShifterDesign:
    """Inductances and principal-branch fluxes for phase ``theta``; never raises on infeasibility."""
    nan = math.nan
    try:
        l1, l2 = design_inductances(theta, dev)
    except DegenerateDesignError as exc:
        return PhaseShifterDesign(theta, nan, nan, nan, nan, False, f"degenerate design: {exc}")
    if l1 < 0 or l2 < 0:
        return PhaseShifterDesign(theta, l1, l2, nan, nan, False, "negative inductance")
    try:
        f1 = flux_from_inductance(dev.ic1, l1)
        f2 = flux_from_inductance(dev.ic2, l2)
    except InfeasibleInductanceError:
        return PhaseShifterDesign(theta, l1, l2, nan, nan, False, "L below Lmin")
    return PhaseShifterDesign(theta, l1, l2, f1, f2, True, "")


# -- flux-plane sweep ---------------------------------------------------------
@dataclass
class FluxSweep:
    """``S21`` over a rectangular grid of (outer, middle) SQUID fluxes.

    Arrays are indexed ``[i1, i2]`` with ``flux1[i1]`` and ``flux2[i2]`` in
    units of Phi0.  ``s21`` is normalized by ``reference`` (all fluxes
    zero); ``s21_raw`` is not.  ``s11_raw`` comes from the cascade route.
    Cells at half-integer flux are flagged in ``divergent`` and evaluated
    in the capacitor-only limit.
    """

    flux1: np.ndarray
    flux2: np.ndarray
    s21_raw: np.ndarray
    s11_raw: np.ndarray
    reference: complex
    divergent: np.ndarray = field(repr=False)

    @property
    def s21(self) -> np.ndarray:
        return self.s21_raw / self.reference

    def power_balance(self) -> np.ndarray:
        return np.abs(self.s11_raw) ** 2 + np.abs(self.s21_raw) ** 2


def _inductance_or_inf(ic: float, flux: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    c = np.abs(np.cos(np.pi * flux))
    div = c < DIVERGENCE_TOL
    with np.errstate(divide="ignore"):
        l = np.where(div, np.inf, minimum_inductance(ic) / np.where(div, 1.0, c))
    return l, div


def flux_sweep(dev: SquidDevice, flux1_range=(0.0, 1.0), flux2_range=(0.0, 1.0),
               n1: int = 121, n2: int = 121) -> FluxSweep:
    """Evaluate ``S21`` on an ``n1 x n2`` grid of inclusive flux ranges."""
    if n1 < 2 or n2 < 2:
        raise ValidationError("flux grids need at least 2 points per axis")
    f1 = np.linspace(float(flux1_range[0]), float(flux1_range[1]), int(n1))
    f2 = np.linspace(float(flux2_range[0]), float(flux2_range[1]), int(n2))
    l1, d1 = _inductance_or_inf(dev.ic1, f1)
    l2, d2 = _inductance_or_inf(dev.ic2, f2)
    L1, L2 = np.meshgrid(l1, l2, indexing="ij")
    div = d1[:, None] | d2[None, :]
    s11, s21c = _chain_arrays(L1, L2, dev.cap, dev.z0, dev.omega, dev.phi_line)
    with np.errstate(invalid="ignore", divide="ignore"):
        s21 = np.where(div, s21c, s21_closed_form(np.where(div, 0.0, L1), np.where(div, 0.0, L2), dev))
    ref = s21_closed_form(dev.lmin1, dev.lmin2, dev)
    return FluxSweep(f1, f2, s21, s11, ref, div)


def reference_transmission(dev: SquidDevice) -> complex:
    """Raw ``S21`` with every SQUID at integer flux (inductances at their minimum)."""
    return s21_closed_form(dev.lmin1, dev.lmin2, dev)


# -- full-transmission curve -----------------------------------------------------
@dataclass(frozen=True)
class CurveSample:
    tau: float
    theta: float
    flux1: float
    flux2: float
    s21: complex


def _feasible(theta: float, dev: SquidDevice, window) -> bool:
    d = design_phase_shifter(theta, dev)
    if not d.feasible:
        return False
    if window is not None:
        (a1, b1), (a2, b2) = window
        return a1 <= d.flux1 <= b1 and a2 <= d.flux2 <= b2
    return True


def feasible_theta_interval(dev: SquidDevice, window=None, n_scan: int = 4096,
                            xtol: float = 1e-13) -> tuple[float, float]:
    """Widest contiguous theta interval whose design is feasible.

    ``window = ((lo1, hi1), (lo2, hi2))`` further restricts the
    principal-branch fluxes.  Edges are refined by bisection to ``xtol``.

    Raises
    ------
    NoCurveError
        If no scanned theta is feasible.
    """
    grid = np.linspace(-math.pi, math.pi, n_scan, endpoint=False)
    ok = np.array([_feasible(t, dev, window) for t in grid])
    if not ok.any():
        raise NoCurveError("no feasible phase range for this device")
    if ok.all():
        return -math.pi, math.pi
    # rotate so the scan starts on an infeasible point and no run wraps
    k0 = int(np.argmin(ok))
    order = np.roll(np.arange(n_scan), -k0)
    th = grid[order] + np.where(order < k0, TWO_PI, 0.0)
    okr = ok[order]
    best, start = None, None
    for i, flag in enumerate(np.append(okr, False)):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            if best is None or i - start > best[1] - best[0]:
                best = (start, i)
            start = None
    i0, i1 = best

    def refine(bad: float, good: float) -> float:
        while abs(good - bad) > xtol:
            mid = 0.5 * (bad + good)
            if _feasible(mid, dev, window):
                good = mid
            else:
                bad = mid
        return good

    lo = refine(th[i0 - 1], th[i0])
    hi = refine(th[i1] if i1 < n_scan else th[0] + TWO_PI, th[i1 - 1])
    return lo, hi


def full_transmission_curve(dev: SquidDevice, theta_samples: int = 201, window=None) -> list[CurveSample]:
    """Trace the unit-transmission locus in the flux plane.

    Samples are equally spaced in theta across the widest feasible interval
    and parametrized by normalized arc length ``tau`` in the
    (flux1, flux2) plane, increasing with theta.

    Raises
    ------
    NoCurveError
        When the feasible interval is empty.
    """
    if theta_samples < 2:
        raise ValidationError("need at least 2 curve samples")
    lo, hi = feasible_theta_interval(dev, window)
    thetas = np.linspace(lo, hi, int(theta_samples))
    pts = []
    for t in thetas:
        d = design_phase_shifter(float(t), dev)
        if not d.feasible:
            raise ComputationError(f"curve sample theta = {t!r} is infeasible")
        s = s21_closed_form(d.l1, d.l2, dev)
        pts.append((float(t), d.flux1, d.flux2, s))
    xy = np.array([[p[1], p[2]] for p in pts])
    seg = np.hypot(*np.diff(xy, axis=0).T)
    arc = np.concatenate([[0.0], np.cumsum(seg)])
    tau = arc / arc[-1] if arc[-1] > 0 else np.linspace(0.0, 1.0, len(pts))
    return [CurveSample(float(tu), *p) for tu, p in zip(tau, pts)]


def mirror_flux(flux):
    """Map a principal-branch flux ``f`` to the equivalent bias ``1 - f`` in ``[0.5, 1]``."""
    return 1.0 - np.asarray(flux)


def curve_endpoints(dev: SquidDevice, window=None, mirrored: bool = True):
    """Endpoints of the full-transmission curve, optionally mapped by :func:`mirror_flux`."""
    curve = full_transmission_curve(dev, 2, window)
    ends = [(c.flux1, c.flux2) for c in (curve[0], curve[-1])]
    if mirrored:
        ends = [tuple(float(v) for v in mirror_flux(e)) for e in ends]
    return ends


def fit_phi(dev: SquidDevice, targets, window=None, mirrored: bool = True,
            n_scan: int = 181) -> tuple[float, float]:
    """Fit the line electrical length to prescribed curve endpoints.

    ``targets`` holds two (flux1, flux2) points; they are matched to the
    curve endpoints in whichever order fits better.  A scan over
    ``[0, pi)`` (``phi`` enters only through ``exp(2 i phi)``) is followed
    by a bounded scalar minimization.

    Returns
    -------
    (phi, cost) : tuple of float
        Fitted ``phi`` in radians and the root-sum-square endpoint mismatch.
    """
    from scipy.optimize import minimize_scalar

    tg = np.asarray(targets, float)

    def cost(phi: float) -> float:
        try:
            ends = np.asarray(curve_endpoints(dev.with_phi(phi), window, mirrored))
        except (NoCurveError, ComputationError):
            return 10.0
        c1 = np.sum((ends - tg) ** 2)
        c2 = np.sum((ends[::-1] - tg) ** 2)
        return float(math.sqrt(min(c1, c2)))

    phis = np.linspace(0.0, math.pi, n_scan, endpoint=False)
    costs = np.array([cost(p) for p in phis])
    k = int(np.argmin(costs))
    h = phis[1] - phis[0]
    res = minimize_scalar(cost, bounds=(phis[k] - h, phis[k] + h), method="bounded",
                          options={"xatol": 1e-8})
    best = (float(res.x), float(res.fun)) if res.fun <= costs[k] else (float(phis[k]), float(costs[k]))
    return best[0] % math.pi, best[1]
