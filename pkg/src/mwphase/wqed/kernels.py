"""Two-excitation Hamiltonian kernels with a compiled fast path.

``BACKEND`` is ``"cython"`` when the extension module imported and
``"python"`` otherwise.  Setting the environment variable
``MWPHASE_PURE_PYTHON=1`` forces the fallback, which builds the packed
operator as a scipy sparse matrix and runs the same Chebyshev recursion.
Both paths agree to round-off (see ``tests/test_kernels.py``).
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from ..errors import ValidationError

try:
    if os.environ.get("MWPHASE_PURE_PYTHON"):
        raise ImportError("pure-python backend requested")
    from . import _ckernels
except ImportError:  # pragma: no cover - exercised when the extension is absent
    _ckernels = None

BACKEND = "cython" if _ckernels is not None else "python"


@dataclass(frozen=True)
class Geometry:
    """Static description of the lattice operator acted on by the kernels.

    Attributes
    ----------
    n : int
        Number of waveguide sites.
    hop : float
        Nearest-neighbour hopping J (the band is -2J cos k).
    sites : ndarray of int64
        Waveguide site each qubit couples to (distinct).
    v : ndarray of float
        Site-qubit couplings.
    om : ndarray of float
        Qubit transition energies.
    hardcore : bool
        Exclude double excitation of a single qubit.
    """

    n: int
    hop: float
    sites: np.ndarray
    v: np.ndarray
    om: np.ndarray
    hardcore: bool
    qat: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        sites = np.ascontiguousarray(self.sites, dtype=np.int64)
        object.__setattr__(self, "sites", sites)
        object.__setattr__(self, "v", np.ascontiguousarray(self.v, dtype=float))
        object.__setattr__(self, "om", np.ascontiguousarray(self.om, dtype=float))
        if len(set(sites.tolist())) != sites.size:
            raise ValidationError("qubit sites must be distinct")
        if sites.size and (sites.min() < 0 or sites.max() >= self.n):
            raise ValidationError("qubit site outside the lattice")
        qat = np.full(self.n, -1, dtype=np.int64)
        qat[sites] = np.arange(sites.size)
        object.__setattr__(self, "qat", qat)

    @property
    def nq(self) -> int:
        return int(self.sites.size)

    @property
    def n_pp(self) -> int:
        return self.n * (self.n + 1) // 2

    @property
    def size(self) -> int:
        nq = self.nq
        return self.n_pp + nq * self.n + nq * (nq + 1) // 2

    def single_particle_bounds(self) -> tuple[float, float]:
        """Gershgorin interval containing the one-excitation spectrum."""
        vsite = np.zeros(self.n)
        vsite[self.sites] = np.abs(self.v)
        r = 2.0 * abs(self.hop) + vsite
        lo = min(float(np.min(-r)), float(np.min(self.om - np.abs(self.v), initial=np.inf)))
        hi = max(float(np.max(r)), float(np.max(self.om + np.abs(self.v), initial=-np.inf)))
        return lo, hi


def row_offset(a, n):
    """Start of row ``a`` in the packed upper triangle of an n x n array."""
    a = np.asarray(a, dtype=np.int64)
    return a * n - (a * (a - 1)) // 2


def pair_index(a, b, n):
    """Packed index of the unordered pair {a, b}."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    return row_offset(lo, n) + hi - lo


def packed_operator(geo: Geometry) -> sp.csr_matrix:
    """Sparse matrix M with ``M @ psi`` equal to the kernel's ``H psi``."""
    n, nq = geo.n, geo.nq
    p = geo.n_pp
    oq, oqq = p, p + nq * n
    rows, cols, vals = [], [], []

    def add(r, c, val):
        r = np.asarray(r, dtype=np.int64)
        c = np.asarray(c, dtype=np.int64)
        rows.append(r)
        cols.append(c)
        vals.append(np.broadcast_to(np.asarray(val, dtype=complex), r.shape))

    a, b = np.triu_indices(n)
    i = pair_index(a, b, n)
    for da, db in ((-1, 0), (1, 0), (0, -1), (0, 1)):
        aa, bb = a + da, b + db
        ok = (aa >= 0) & (aa < n) & (bb >= 0) & (bb < n)
        add(i[ok], pair_index(aa[ok], bb[ok], n), -geo.hop)
    for j, s in enumerate(geo.sites):
        m = a == s
        add(i[m], oq + j * n + b[m], geo.v[j])
        m = b == s
        add(i[m], oq + j * n + a[m], geo.v[j])

    x = np.arange(n)
    for j, s in enumerate(geo.sites):
        r = oq + j * n + x
        add(r[1:], r[:-1], -geo.hop)
        add(r[:-1], r[1:], -geo.hop)
        add(r, r, geo.om[j])
        add(r, pair_index(x, s, n), geo.v[j])
        for m, sm in enumerate(geo.sites):
            if geo.hardcore and m == j:
                continue
            add([oq + j * n + sm], [oqq + pair_index(m, j, nq)], geo.v[m])

    for j in range(nq):
        for m in range(j, nq):
            if geo.hardcore and m == j:
                continue
            r = oqq + pair_index(j, m, nq)
            add([r], [r], geo.om[j] + geo.om[m])
            add([r], [oq + m * n + geo.sites[j]], geo.v[j])
            add([r], [oq + j * n + geo.sites[m]], geo.v[m])

    mat = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(geo.size, geo.size),
    )
    return mat.tocsr()


class _PythonKernels:
    """Fallback using a cached scipy sparse operator."""

    name = "python"

    def __init__(self):
        self._cache: dict[int, tuple[Geometry, sp.csr_matrix]] = {}

    def _op(self, geo: Geometry) -> sp.csr_matrix:
        hit = self._cache.get(id(geo))
        if hit is None or hit[0] is not geo:
            self._cache.clear()
            hit = (geo, packed_operator(geo))
            self._cache[id(geo)] = hit
        return hit[1]

    def apply_h2(self, psi: np.ndarray, geo: Geometry) -> np.ndarray:
        return self._op(geo) @ psi

    def chebyshev_series(self, psi, coeffs, scale, center, geo):
        op = self._op(geo)
        t0 = np.array(psi, dtype=complex)
        acc = coeffs[0] * t0
        if len(coeffs) == 1:
            return acc
        t1 = (op @ t0 - center * t0) / scale
        acc += coeffs[1] * t1
        for c in coeffs[2:]:
            t0 = 2.0 * (op @ t1 - center * t1) / scale - t0
            acc += c * t0
            t0, t1 = t1, t0
        return acc


class _CythonKernels:
    name = "cython"

    def apply_h2(self, psi: np.ndarray, geo: Geometry) -> np.ndarray:
        out = np.zeros(geo.size, dtype=complex)
        _ckernels.apply_h2(np.ascontiguousarray(psi, dtype=complex), out, geo.n,
                           geo.hop, geo.qat, geo.sites, geo.v, geo.om, geo.hardcore)
        return out

    def chebyshev_series(self, psi, coeffs, scale, center, geo):
        return _ckernels.chebyshev_series(
            np.ascontiguousarray(psi, dtype=complex),
            np.ascontiguousarray(coeffs, dtype=complex),
            float(scale), float(center), geo.n, geo.hop, geo.qat, geo.sites,
            geo.v, geo.om, geo.hardcore,
        )


PYTHON = _PythonKernels()
COMPILED = _CythonKernels() if _ckernels is not None else None


def get_kernels(name: str | None = None):
    """Return the kernel implementation ``name`` (default: the active backend)."""
    if name is None:
        name = BACKEND
    if name == "python":
        return PYTHON
    if name == "cython":
        if COMPILED is None:
            raise RuntimeError("compiled kernels are not available in this build")
        return COMPILED
    raise ValueError(f"unknown kernel backend {name!r}")
