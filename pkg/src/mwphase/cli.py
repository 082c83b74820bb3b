"""Command-line front end (``mwphase``).

Exit codes: 0 success, 2 usage error, 3 validation error, 4 computation
error.  Failures print one machine-readable line on stderr::

    mwphase-error code=3 kind=ValidationError message="..."
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import __version__
from .config import RunConfig, load, load_matrix, parse_grid
from .errors import ComputationError, MwphaseError, ValidationError

EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_COMPUTATION = 4

SWEEP_HEADER = ["flux1_phi0", "flux2_phi0", "s21_re", "s21_im", "s21_abs", "s21_arg_rad"]
CURVE_HEADER = ["tau", "theta_rad", "flux1_phi0", "flux2_phi0", "s21_abs", "s21_arg_rad"]
SINGLE_HEADER = ["gamma", "delta_over_gamma", "s21_re", "s21_im", "s21_abs", "s21_arg_rad"]
TWO_HEADER = ["gamma", "x_pulse_sites", "nl_phase_rad", "refl_density", "E_o", "E_p"]
PROFILE_HEADER = ["dx_sites", "b_re", "b_im"]
BAND_HEADER = ["gamma", "delta_f_over_gamma", "delta_lo_over_gamma", "delta_hi_over_gamma"]
CURRENT_HEADER = ["line", "current_a", "flux_target_wb", "flux_realized_wb"]


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems exit with code 2 and a tagged line
        self.print_usage(sys.stderr)
        _report(EXIT_USAGE, "UsageError", message)
        raise SystemExit(EXIT_USAGE)


def _report(code: int, kind: str, message: str) -> None:
    print(f"mwphase-error code={code} kind={kind} message={json.dumps(str(message))}", file=sys.stderr)


def fmt(x) -> str:
    """17 significant digits; integers stay integers."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return format(float(x), ".17g")


def write_csv(path: Path, header: list[str], rows) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="ascii") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([fmt(v) for v in r])
    return path


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.replace(";", ",").split(",") if v.strip()]
    except ValueError:
        raise ValidationError(f"expected comma-separated numbers, got {text!r}") from None


def _data_file(name: str) -> Path:
    return Path(str(resources.files("mwphase") / "data" / name))


def _load_config(path: str | None) -> RunConfig:
    if path is None:
        return RunConfig()
    p = Path(path)
    if not p.exists() and _data_file(p.name).exists():
        p = _data_file(p.name)
    return load(p)


# -- subcommands ------------------------------------------------------------------
def cmd_sweep_flux(args) -> int:
    from .squid import flux_sweep

    cfg = _load_config(args.config)
    dev = cfg.device()
    n1, n2 = parse_grid(args.grid) if args.grid else cfg.grid()
    r1 = (cfg.get("flux1_min", 0.0), cfg.get("flux1_max", 1.0))
    r2 = (cfg.get("flux2_min", 0.0), cfg.get("flux2_max", 1.0))
    sw = flux_sweep(dev, r1, r2, n1, n2)
    out = Path(args.out)
    for name, field in (("sweep.csv", sw.s21), ("sweep_raw.csv", sw.s21_raw)):
        rows = (
            (sw.flux1[i], sw.flux2[j], field[i, j].real, field[i, j].imag, abs(field[i, j]),
             math.atan2(field[i, j].imag, field[i, j].real))
            for i in range(n1) for j in range(n2)
        )
        write_csv(out / name, SWEEP_HEADER, rows)
    print(f"reference_s21_abs = {fmt(abs(sw.reference))}")
    print(f"divergent_cells = {int(sw.divergent.sum())}")
    print(f"wrote {out / 'sweep.csv'} and {out / 'sweep_raw.csv'}")
    return 0


def cmd_design(args) -> int:
    from .squid import design_phase_shifter, s21_closed_form

    dev = _load_config(args.config).device()
    d = design_phase_shifter(args.theta, dev)
    print(f"theta_rad = {fmt(d.theta)}")
    print(f"phi_line_rad = {fmt(dev.phi_line)}")
    print(f"l1_h = {fmt(d.l1)}")
    print(f"l2_h = {fmt(d.l2)}")
    print(f"lmin1_h = {fmt(dev.lmin1)}")
    print(f"lmin2_h = {fmt(dev.lmin2)}")
    print(f"flux1_phi0 = {fmt(d.flux1)}")
    print(f"flux2_phi0 = {fmt(d.flux2)}")
    print(f"feasible = {str(d.feasible).lower()}")
    if d.reason:
        print(f"reason = {d.reason}")
    if math.isfinite(d.l1) and math.isfinite(d.l2):
        s = s21_closed_form(d.l1, d.l2, dev)
        print(f"s21_abs = {fmt(abs(s))}")
        print(f"s21_arg_rad = {fmt(math.atan2(s.imag, s.real))}")
    return 0


def _window(text: str | None):
    if not text:
        return None
    v = _float_list(text)
    if len(v) != 4:
        raise ValidationError("--window needs lo1,hi1,lo2,hi2 (principal-branch fluxes)")
    return ((v[0], v[1]), (v[2], v[3]))


def cmd_ft_curve(args) -> int:
    from .squid import fit_phi, full_transmission_curve

    cfg = _load_config(args.config)
    dev = cfg.device()
    window = _window(args.window)
    if args.fit_phi:
        phi, cost = fit_phi(dev, [(0.7, 0.58), (0.54, 1.0)], window=window)
        dev = dev.with_phi(phi)
        print(f"fitted_phi_line_rad = {fmt(phi)}")
        print(f"fit_endpoint_mismatch_phi0 = {fmt(cost)}")
    curve = full_transmission_curve(dev, args.samples, window=window)
    rows = ((c.tau, c.theta, c.flux1, c.flux2, abs(c.s21), math.atan2(c.s21.imag, c.s21.real))
            for c in curve)
    path = write_csv(Path(args.out) / "curve.csv", CURVE_HEADER, rows)
    print(f"theta_range_rad = {fmt(curve[0].theta)} {fmt(curve[-1].theta)}")
    print(f"wrote {path}")
    return 0


def cmd_single_photon(args) -> int:
    from .wqed.analytic import single_photon_s21

    gammas = _float_list(args.gamma)
    lo, hi = _float_list(args.delta_range)
    if args.points < 2:
        raise ValidationError("--points must be at least 2")
    ds = np.linspace(lo, hi, args.points)
    rows = []
    for g in gammas:
        s = single_photon_s21(ds, 1.0, g)
        rows += [(g, d, z.real, z.imag, abs(z), math.atan2(z.imag, z.real)) for d, z in zip(ds, s)]
    path = write_csv(Path(args.out) / "single_photon.csv", SINGLE_HEADER, rows)
    print(f"wrote {path}")
    return 0


def cmd_band(args) -> int:
    from .wqed.analytic import full_transmission_detuning, transmission_band

    thr = math.sqrt(args.threshold_power) if args.threshold is None else args.threshold
    gs = np.linspace(0.0, 2.0, args.points + 2)[1:-1]
    rows = []
    for g in gs:
        lo, hi = transmission_band(float(g), 1.0, thr)
        rows.append((g, full_transmission_detuning(float(g), 1.0)[0], lo, hi))
    path = write_csv(Path(args.out) / "band.csv", BAND_HEADER, rows)
    print(f"threshold_amplitude = {fmt(thr)}")
    print(f"wrote {path}")
    return 0


def cmd_two_photon(args) -> int:
    from .wqed.pipeline import default_widths, prepare_model, scan_widths

    cfg = _load_config(args.config)
    gamma_over_v = args.gamma_over_v if args.gamma_over_v is not None else cfg.get("gamma_over_v", 0.05)
    out = Path(args.out)
    rows = []
    for g in _float_list(args.gamma):
        model = prepare_model(g, gamma_over_v=gamma_over_v, calibrate=not args.no_calibrate)
        widths = _float_list(args.widths) if args.widths else default_widths(model)
        if len(widths) < 3 and args.collimated_phase is None:
            raise ValidationError("give at least three --widths or an explicit --collimated-phase")
        scan = scan_widths(model, widths, collimated_phase=args.collimated_phase)
        for r in scan.runs:
            eo, ep = scan.errors_at(r.width)
            rows.append((g, r.width, r.nonlinear_phase, r.reflection_density, eo, ep))
            c = r.correction
            keep = np.isfinite(c.b)
            write_csv(out / f"b_profile_gamma{g:g}_x{r.width:.6g}.csv", PROFILE_HEADER,
                      ((d, b.real, b.imag) for d, b in zip(c.dx[keep], c.b[keep])))
            print(f"gamma={g:g} x_pulse={r.width:.6g} nl_phase={r.nonlinear_phase:.6f} "
                  f"norm_drift={r.norm_drift:.2e} seconds={r.seconds:.1f}")
        print(f"gamma={g:g} collimated_phase_rad = {fmt(scan.collimated_phase)}")
    path = write_csv(out / "two_photon.csv", TWO_HEADER, rows)
    print(f"wrote {path}")
    return 0


def cmd_compensate(args) -> int:
    from .flux_control import compensation_currents, realized_flux, to_webers, validate_matrix

    m = load_matrix(args.matrix if args.matrix else _data_file("synthetic_matrix.txt"))
    target = to_webers(_float_list(args.flux), args.unit)
    diag = validate_matrix(m)
    cur = compensation_currents(m, target, unit="wb")
    got = realized_flux(m, cur)
    rows = [(i + 1, cur[i], target[i], got[i]) for i in range(len(cur))]
    path = write_csv(Path(args.out) / "currents.csv", CURRENT_HEADER, rows)
    print(f"determinant = {fmt(diag.determinant)}")
    print(f"condition = {fmt(diag.condition)}")
    print("dominance = " + " ".join(fmt(v) for v in diag.dominance))
    for i, c in enumerate(cur):
        print(f"current_{i + 1}_a = {fmt(c)}")
    print(f"wrote {path}")
    return 0


def cmd_selftest(args) -> int:
    from .selftest import run_selftest

    failures = run_selftest(verbose=not args.quiet)
    if failures:
        raise ComputationError(f"{failures} self-test check(s) failed")
    return 0


# -- entry point ---------------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="mwphase", description="Microwave photonic phase-shifter toolkit")
    p.add_argument("--version", action="version", version=f"mwphase {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, config=True):
        if config:
            sp.add_argument("--config", help="key = value config file (bundled: device.cfg)")
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--format", choices=["csv"], default="csv")

    s = sub.add_parser("sweep-flux", help="S21 over the (flux1, flux2) plane")
    common(s)
    s.add_argument("--grid", help="e.g. 121x121 (overrides the config)")
    s.set_defaults(func=cmd_sweep_flux)

    s = sub.add_parser("design", help="inductances and fluxes for a phase shift")
    common(s)
    s.add_argument("--theta", type=float, required=True, help="phase shift in radians")
    s.set_defaults(func=cmd_design)

    s = sub.add_parser("ft-curve", help="trace the full-transmission curve")
    common(s)
    s.add_argument("--samples", type=int, default=201)
    s.add_argument("--window", help="lo1,hi1,lo2,hi2 principal-branch flux window")
    s.add_argument("--fit-phi", action="store_true", help="fit phi_line to the curve endpoints")
    s.set_defaults(func=cmd_ft_curve)

    s = sub.add_parser("single-photon", help="single-photon transmission sweep")
    common(s, config=False)
    s.add_argument("--gamma", default="0.21,0.62,1.0,1.5", help="comma-separated coupling ratios")
    s.add_argument("--delta-range", default="-3,3", help="detuning range in units of Gamma")
    s.add_argument("--points", type=int, default=121)
    s.set_defaults(func=cmd_single_photon)

    s = sub.add_parser("two-photon", help="lattice two-photon scattering")
    common(s)
    s.add_argument("--gamma", default="0.62")
    s.add_argument("--widths", help="pulse widths in sites (default 3, 4.5, 6 decay lengths)")
    s.add_argument("--gamma-over-v", type=float, default=None)
    s.add_argument("--collimated-phase", type=float, default=None)
    s.add_argument("--no-calibrate", action="store_true")
    s.set_defaults(func=cmd_two_photon)

    s = sub.add_parser("band", help="detuning band with |S21| above a threshold")
    common(s, config=False)
    s.add_argument("--points", type=int, default=50)
    s.add_argument("--threshold", type=float, default=None, help="amplitude threshold")
    s.add_argument("--threshold-power", type=float, default=0.9, help="power threshold (default 0.9)")
    s.set_defaults(func=cmd_band)

    s = sub.add_parser("compensate", help="bias currents for target fluxes")
    common(s, config=False)
    s.add_argument("--matrix", help="matrix file (default: bundled synthetic example)")
    s.add_argument("--flux", required=True, help="comma-separated target fluxes")
    s.add_argument("--unit", default="phi0", choices=["phi0", "wb"])
    s.set_defaults(func=cmd_compensate)

    s = sub.add_parser("selftest", help="run the invariant suite")
    s.add_argument("--quiet", action="store_true")
    s.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return int(args.func(args))
    except (ValidationError, ValueError) as exc:
        _report(EXIT_VALIDATION, type(exc).__name__, exc)
        return EXIT_VALIDATION
    except (MwphaseError, ArithmeticError, np.linalg.LinAlgError) as exc:
        _report(EXIT_COMPUTATION, type(exc).__name__, exc)
        return EXIT_COMPUTATION


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
