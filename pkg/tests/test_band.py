import math

import numpy as np
import pytest

from mwphase.wqed.analytic import full_transmission_detuning, single_photon_s21, transmission_band

THR = math.sqrt(0.9)


def _grid_band(g, thr, step=1e-4):
    """Brute-force scan oracle on a 1e-4 Gamma grid."""
    df, _ = full_transmission_detuning(g, 1.0)
    ds = np.arange(0.0, df + 20.0, step)
    ok = np.abs(single_photon_s21(ds, 1.0, g)) >= thr
    k = int(np.argmin(np.abs(ds - df)))
    lo = k
    while lo > 0 and ok[lo - 1]:
        lo -= 1
    hi = k
    while hi < len(ds) - 1 and ok[hi + 1]:
        hi += 1
    return ds[lo], (ds[hi] if hi < len(ds) - 1 else math.inf)


@pytest.mark.parametrize("g", [0.05, 0.21, 0.62, 1.0, 1.5, 1.9])
def test_band_matches_grid_scan(g):
    lo, hi = transmission_band(g, 1.0, THR)
    glo, ghi = _grid_band(g, THR)
    assert abs(lo - glo) <= 2e-4
    if math.isinf(ghi):
        assert math.isinf(hi)
    else:
        assert abs(hi - ghi) <= 2e-4


def test_band_collapses_at_unit_threshold():
    for g in (0.3, 1.2):
        df, _ = full_transmission_detuning(g, 1.0)
        lo, hi = transmission_band(g, 1.0, 1.0)
        assert lo == hi == df
        lo, hi = transmission_band(g, 1.0, 1.0 - 1e-10)
        assert abs(lo - df) < 1e-3 and (hi - df) < 1e-3


def test_band_scales_with_gamma_rate():
    a = transmission_band(0.62, 1.0, THR)
    b = transmission_band(0.62, 3.0, THR)
    assert abs(b[0] - 3 * a[0]) < 1e-8
