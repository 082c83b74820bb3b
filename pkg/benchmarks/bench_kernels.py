"""Compare the compiled and pure-Python two-excitation kernels.

Usage::

    python benchmarks/bench_kernels.py [--sites 200 400] [--repeat 3]

Prints one line per lattice size with the best-of-``repeat`` wall time of a
single Hamiltonian application and of a 64-term Chebyshev series, plus the
maximum deviation between the two backends.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from mwphase.wqed.kernels import COMPILED, PYTHON, Geometry


def _geometry(n: int) -> Geometry:
    mid = n // 2
    return Geometry(n, 1.0, np.array([mid - 1, mid, mid + 1]), np.array([0.2, 0.15, 0.2]),
                    np.array([0.05, 0.05, 0.05]), True)


def _best(fn, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def bench(n: int, repeat: int) -> dict:
    geo = _geometry(n)
    rng = np.random.default_rng(0)
    psi = rng.normal(size=geo.size) + 1j * rng.normal(size=geo.size)
    coeffs = rng.normal(size=64) + 0j
    PYTHON.apply_h2(psi, geo)  # build and cache the sparse operator outside the timing
    row = {"n": n, "size": geo.size}
    row["py_apply"] = _best(lambda: PYTHON.apply_h2(psi, geo), repeat)
    row["py_cheb"] = _best(lambda: PYTHON.chebyshev_series(psi, coeffs, 2.5, 0.0, geo), repeat)
    if COMPILED is not None:
        row["cy_apply"] = _best(lambda: COMPILED.apply_h2(psi, geo), repeat)
        row["cy_cheb"] = _best(lambda: COMPILED.chebyshev_series(psi, coeffs, 2.5, 0.0, geo), repeat)
        a = PYTHON.chebyshev_series(psi, coeffs, 2.5, 0.0, geo)
        b = COMPILED.chebyshev_series(psi, coeffs, 2.5, 0.0, geo)
        row["max_dev"] = float(np.max(np.abs(a - b)) / np.max(np.abs(a)))
    return row


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sites", type=int, nargs="+", default=[200, 400, 800])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    if COMPILED is None:
        print("compiled kernels unavailable; timing the fallback only")
    for n in args.sites:
        r = bench(n, args.repeat)
        line = f"n={r['n']:5d} dim={r['size']:9d} python apply={r['py_apply']*1e3:8.2f} ms cheb64={r['py_cheb']:7.3f} s"
        if "cy_apply" in r:
            line += (f" | cython apply={r['cy_apply']*1e3:8.2f} ms cheb64={r['cy_cheb']:7.3f} s"
                     f" | speedup {r['py_cheb']/r['cy_cheb']:5.2f}x rel.dev {r['max_dev']:.1e}")
        print(line)


if __name__ == "__main__":
    main()
