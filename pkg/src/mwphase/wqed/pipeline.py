"""End-to-end two-photon scattering runs on the lattice.

A run pairs a hard-core evolution with the bosonic reference and the freely
propagated envelope on the same lattice and time, then reduces them to the
nonlinear phase, reflection density and window errors.  Pulse widths are
naturally measured in units of the slowest collective decay length
``v / (gamma Gamma)``.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from ..errors import ValidationError
from .analysis import (
    NonlinearCorrection,
    extract_nonlinear_correction,
    extrapolate_collimated,
    overlap_error,
    phase_error,
    reflected_slice,
    reflection_density,
)
from .evolve import Pulse, RunPlan, evolve_two_photon, linear_reference, plan_run
from .lattice import LatticeConfig, LatticeModel, build_lattice_model, calibrate_coupling
from .state import TwoPhotonState

DEFAULT_WIDTH_MULTIPLES = (3.0, 4.5, 6.0)


def decay_length(model: LatticeModel) -> float:
    """``v / (gamma Gamma)`` in sites (``v / Gamma`` when gamma >= 1)."""
    rate = model.gamma_rate * min(1.0, model.gamma_ratio) if model.gamma_ratio > 0 else model.gamma_rate
    return model.velocity / rate


def default_widths(model: LatticeModel, multiples=DEFAULT_WIDTH_MULTIPLES) -> list[float]:
    ell = decay_length(model)
    return [float(k * ell) for k in multiples]


def prepare_model(gamma_ratio: float, *, gamma_over_v: float = 0.05, calibrate: bool = True,
                  **kw) -> LatticeModel:
    """Lattice model at ``delta_f^+`` with (optionally) fitted couplings."""
    m = build_lattice_model(LatticeConfig(gamma_ratio=gamma_ratio, gamma_over_v=gamma_over_v, **kw))
    return calibrate_coupling(m) if calibrate else m


@dataclass
class PulseRun:
    """Reduced results of one pulse width.

    ``states`` holds ``(psi_nl, psi_lin, psi_free)`` when requested.
    """

    width: float
    plan: RunPlan
    correction: NonlinearCorrection
    reflection_density: float
    reflected_coincidence: float
    norm_drift: float
    energy_drift: float
    edge_probability: float
    seconds: float
    states: tuple | None = field(default=None, repr=False)

    @property
    def nonlinear_phase(self) -> float:
        return self.correction.nonlinear_phase


def scatter(model: LatticeModel, pulse: Pulse, plan: RunPlan | None = None,
            backend: str | None = None) -> tuple[TwoPhotonState, TwoPhotonState, TwoPhotonState]:
    """Hard-core, bosonic-reference and free states at the same final time."""
    if plan is None:
        plan = plan_run(model, pulse)
    nl = evolve_two_photon(model, pulse, plan=plan, backend=backend)
    lin = linear_reference(model, pulse, plan)
    free = linear_reference(model, pulse, plan, free=True)
    return nl, lin, free


def run_pulse(model: LatticeModel, width: float, *, dx=None, keep_states: bool = False,
              backend: str | None = None) -> PulseRun:
    """Scatter a collimated Gaussian pulse of amplitude width ``width`` sites."""
    t0 = time.perf_counter()
    pulse = Pulse(float(width))
    plan = plan_run(model, pulse)
    nl, lin, free = scatter(model, pulse, plan, backend)
    if dx is None:
        dx = np.arange(0, int(math.ceil(2.0 * width)) + 1)
    corr = extract_nonlinear_correction(nl, lin, free, dx, undefined="nan")
    rd = reflection_density(nl, lin)
    rc = float(reflected_slice(nl, free, [0])[0])
    return PulseRun(
        width=float(width),
        plan=plan,
        correction=corr,
        reflection_density=float(rd),
        reflected_coincidence=rc,
        norm_drift=float(nl.meta["norm_drift"]),
        energy_drift=float(nl.meta["energy_drift"]),
        edge_probability=float(nl.meta.get("edge_probability", 0.0)),
        seconds=time.perf_counter() - t0,
        states=(nl, lin, free) if keep_states else None,
    )


@dataclass
class WidthScan:
    """Nonlinear phase over several pulse widths and its collimated extrapolation.

    ``error_windows`` are effective pulse widths (sites) over which E_o and
    E_p integrate the correlated profile of the widest, most monochromatic
    run (``profile_width``).
    """

    gamma_ratio: float
    runs: list[PulseRun]
    collimated_phase: float
    extrapolation_slope: float
    profile_width: float
    error_windows: list[float]
    overlap_errors: list[float]
    phase_errors: list[float]

    @property
    def widths(self) -> list[float]:
        return [r.width for r in self.runs]

    @property
    def phases(self) -> list[float]:
        return [r.nonlinear_phase for r in self.runs]

    def errors_at(self, window: float) -> tuple[float, float]:
        i = self.error_windows.index(float(window))
        return self.overlap_errors[i], self.phase_errors[i]


def scan_widths(model: LatticeModel, widths=None, *, collimated_phase: float | None = None,
                error_windows=None, keep_states: bool = False,
                backend: str | None = None) -> WidthScan:
    """Run every width, extrapolate the collimated phase and evaluate E_o and E_p.

    Parameters
    ----------
    widths : sequence of float, optional
        Pulse widths in sites; default ``3, 4.5, 6`` decay lengths.
    collimated_phase : float, optional
        Phase used to build the ideal state; defaults to the extrapolated
        value (requires at least three widths).
    error_windows : sequence of float, optional
        Effective pulse widths for E_o and E_p; defaults to the run widths.
    keep_states : bool
        Keep the final states of the widest run on its :class:`PulseRun`.
    """
    widths = default_widths(model) if widths is None else [float(w) for w in widths]
    if not widths:
        raise ValidationError("need at least one pulse width")
    windows = list(widths) if error_windows is None else [float(w) for w in error_windows]
    widest = max(widths)
    runs = [run_pulse(model, w, keep_states=(w == widest), backend=backend) for w in widths]
    slope = math.nan
    if collimated_phase is None:
        ex = extrapolate_collimated(widths, [r.nonlinear_phase for r in runs])
        collimated_phase, slope = ex.intercept, ex.slope
    prof = next(r for r in runs if r.width == widest)
    nl, lin, _ = prof.states
    eo = [overlap_error(nl, collimated_phase, lin, x) for x in windows]
    ep = [phase_error(nl, collimated_phase, lin, x) for x in windows]
    if not keep_states:
        prof.states = None
    return WidthScan(model.gamma_ratio, runs, float(collimated_phase), float(slope), widest,
                     windows, eo, ep)
