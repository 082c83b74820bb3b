"""Flat ``key = value unit`` run configuration.

Every physical quantity carries a unit suffix (``ic1 = 0.7 uA``,
``freq = 6.3 GHz``, ``cap = 26 fF``).  Values are converted to SI on
parsing; :func:`dumps` writes them back in canonical units with
round-trip precision, so ``loads(dumps(loads(text)))`` equals
``loads(text)``.  Lines starting with ``#`` and blank lines are ignored.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .constants import PHI0, TWO_PI
from .errors import ValidationError

# unit tables: suffix -> factor to the canonical (first listed) unit
UNITS: dict[str, dict[str, float]] = {
    "current": {"A": 1.0, "mA": 1e-3, "uA": 1e-6, "µA": 1e-6, "nA": 1e-9},
    "capacitance": {"F": 1.0, "nF": 1e-9, "pF": 1e-12, "fF": 1e-15},
    "frequency": {"Hz": 1.0, "kHz": 1e3, "MHz": 1e6, "GHz": 1e9},
    "impedance": {"ohm": 1.0, "Ohm": 1.0, "Ω": 1.0, "kohm": 1e3},
    "angle": {"rad": 1.0, "deg": math.pi / 180.0},
    "flux": {"phi0": 1.0, "Phi0": 1.0, "Wb": 1.0 / PHI0},
    "sites": {"sites": 1.0},
    "ratio": {"1": 1.0},
}

# key -> (dimension, positive-only)
SCHEMA: dict[str, tuple[str, bool]] = {
    "ic1": ("current", True),
    "ic2": ("current", True),
    "cap": ("capacitance", True),
    "z0": ("impedance", True),
    "freq": ("frequency", True),
    "phi_line": ("angle", False),
    "flux1_min": ("flux", False),
    "flux1_max": ("flux", False),
    "flux2_min": ("flux", False),
    "flux2_max": ("flux", False),
    "n_sites": ("sites", True),
    "k0": ("angle", True),
    "gamma_over_v": ("ratio", True),
    "gamma_ratio": ("ratio", False),
    "seed": ("ratio", False),
}
STRING_KEYS = {"grid", "out", "hardcore"}


@dataclass
class RunConfig:
    """Parsed configuration: SI (or flux-quantum / site) values plus raw strings."""

    values: dict[str, float] = field(default_factory=dict)
    strings: dict[str, str] = field(default_factory=dict)

    def get(self, key: str, default=None):
        if key in self.values:
            return self.values[key]
        return self.strings.get(key, default)

    def require(self, *keys: str) -> list:
        missing = [k for k in keys if k not in self.values and k not in self.strings]
        if missing:
            raise ValidationError(f"config is missing required keys: {', '.join(missing)}")
        return [self.get(k) for k in keys]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, RunConfig)
            and self.values == other.values
            and self.strings == other.strings
        )

    def grid(self, default: str = "121x121") -> tuple[int, int]:
        return parse_grid(self.strings.get("grid", default))

    def device(self):
        """Build a :class:`~mwphase.squid.SquidDevice` from the config."""
        from .squid import SquidDevice

        ic1, ic2, cap, freq = self.require("ic1", "ic2", "cap", "freq")
        return SquidDevice(
            ic1=ic1,
            ic2=ic2,
            cap=cap,
            z0=self.values.get("z0", 50.0),
            phi_line=self.values.get("phi_line", 0.0),
            omega=TWO_PI * freq,
        )


def parse_grid(text: str) -> tuple[int, int]:
    parts = text.lower().replace("×", "x").split("x")
    try:
        n1, n2 = (int(p) for p in parts)
    except ValueError:
        raise ValidationError(f"grid must look like 121x121, got {text!r}") from None
    if n1 < 2 or n2 < 2:
        raise ValidationError("grid needs at least 2 points per axis")
    return n1, n2


def parse_quantity(key: str, text: str) -> float:
    """Convert ``"<number> <unit>"`` for ``key`` to its canonical unit."""
    dim, positive = SCHEMA[key]
    parts = text.split()
    table = UNITS[dim]
    if dim == "ratio" and len(parts) == 1:
        parts.append("1")
    if len(parts) != 2:
        raise ValidationError(f"{key}: expected '<number> <unit>', got {text!r}")
    num, unit = parts
    if unit not in table:
        raise ValidationError(f"{key}: unit {unit!r} not one of {sorted(table)}")
    try:
        val = float(num) * table[unit]
    except ValueError:
        raise ValidationError(f"{key}: {num!r} is not a number") from None
    if not math.isfinite(val):
        raise ValidationError(f"{key}: value must be finite")
    if positive and not val > 0:
        raise ValidationError(f"{key}: value must be positive, got {text!r}")
    return val


def loads(text: str) -> RunConfig:
    """Parse configuration text."""
    cfg = RunConfig()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"line {lineno}: expected 'key = value unit'")
        key, val = (s.strip() for s in line.split("=", 1))
        if key in cfg.values or key in cfg.strings:
            raise ValidationError(f"line {lineno}: duplicate key {key!r}")
        if key in SCHEMA:
            cfg.values[key] = parse_quantity(key, val)
        elif key in STRING_KEYS:
            cfg.strings[key] = val
        else:
            raise ValidationError(f"line {lineno}: unknown key {key!r}")
    return cfg


def load(path) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read config {path}: {exc}") from None
    return loads(text)


def dumps(cfg: RunConfig) -> str:
    """Serialize in canonical units; keys in schema order, strings last."""
    lines = []
    for key, (dim, _) in SCHEMA.items():
        if key in cfg.values:
            unit = next(iter(UNITS[dim]))
            lines.append(f"{key} = {cfg.values[key]!r} {unit}")
    for key in sorted(cfg.strings):
        lines.append(f"{key} = {cfg.strings[key]}")
    return "\n".join(lines) + "\n"


def load_matrix(path) -> np.ndarray:
    """Read a row-major inductance matrix.

    The first non-comment line declares the unit (``units = Wb/A``,
    ``pH`` or ``phi0/mA``); every following line is one whitespace-separated
    row.  Returns the matrix in Wb/A.
    """
    factors = {"Wb/A": 1.0, "H": 1.0, "pH": 1e-12, "nH": 1e-9, "phi0/mA": PHI0 / 1e-3,
               "phi0/A": PHI0}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ValidationError(f"cannot read matrix {path}: {exc}") from None
    body = [ln.split("#", 1)[0].strip() for ln in lines]
    body = [ln for ln in body if ln]
    if not body or not body[0].replace(" ", "").startswith("units="):
        raise ValidationError("matrix file must start with 'units = <unit>'")
    unit = body[0].split("=", 1)[1].strip()
    if unit not in factors:
        raise ValidationError(f"matrix unit {unit!r} not one of {sorted(factors)}")
    try:
        rows = [[float(v) for v in ln.replace(",", " ").split()] for ln in body[1:]]
    except ValueError:
        raise ValidationError("matrix rows must contain numbers only") from None
    if not rows or any(len(r) != len(rows) for r in rows):
        raise ValidationError("matrix must be square")
    return np.array(rows) * factors[unit]
