"""Two-excitation state in packed, exchange-symmetric storage."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .kernels import Geometry, pair_index, row_offset


@dataclass
class TwoPhotonState:
    """Symmetric two-excitation amplitudes on the lattice.

    Only ``psi(a, b)`` with ``a <= b`` is stored, so exchange symmetry of
    the photon-photon block holds by construction.  Amplitudes are those of
    the first-quantized wavefunction: the norm counts each unordered pair of
    distinct positions twice.

    Attributes
    ----------
    data : ndarray of complex
        Packed vector (photon pairs, photon-qubit block, qubit pairs).
    n : int
        Number of chain sites.
    nq : int
        Number of qubits.
    hardcore : bool
        Whether same-qubit double excitation is excluded.
    time : float
        Evolution time reached, in inverse hopping units.
    meta : dict
        Run bookkeeping (norm drift, energy drift, plan parameters).
    """

    data: np.ndarray
    n: int
    nq: int
    hardcore: bool
    time: float = 0.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        expect = self.n * (self.n + 1) // 2 + self.nq * self.n + self.nq * (self.nq + 1) // 2
        if self.data.shape != (expect,):
            raise ValueError(f"packed vector has length {self.data.shape}, expected {expect}")
        if self.hardcore:
            self.data[self._qq_diag()] = 0.0

    # -- layout helpers -------------------------------------------------
    @property
    def n_pp(self) -> int:
        return self.n * (self.n + 1) // 2

    def _qq_diag(self) -> np.ndarray:
        j = np.arange(self.nq)
        return self.n_pp + self.nq * self.n + pair_index(j, j, self.nq)

    def weights(self) -> np.ndarray:
        """Multiplicity of each stored amplitude in the full two-particle space."""
        w = np.full(self.data.size, 2.0)
        w[row_offset(np.arange(self.n), self.n)] = 1.0
        w[self._qq_diag()] = 1.0
        return w

    @property
    def photon_photon_packed(self) -> np.ndarray:
        return self.data[: self.n_pp]

    @property
    def photon_qubit(self) -> np.ndarray:
        """Array of shape (n, nq) with ``psi(x, q_j)``."""
        blk = self.data[self.n_pp : self.n_pp + self.nq * self.n]
        return blk.reshape(self.nq, self.n).T

    @property
    def qubit_qubit(self) -> np.ndarray:
        """Symmetric (nq, nq) array of qubit-pair amplitudes."""
        blk = self.data[self.n_pp + self.nq * self.n :]
        i, j = np.triu_indices(self.nq)
        out = np.zeros((self.nq, self.nq), dtype=complex)
        out[i, j] = blk
        out[j, i] = blk
        return out

    def amplitude(self, x1, x2) -> np.ndarray:
        """Photon-photon amplitude at (x1, x2); symmetric in its arguments."""
        return self.data[pair_index(x1, x2, self.n)]

    def photon_photon_dense(self) -> np.ndarray:
        """Full symmetric (n, n) photon-photon array (small lattices only)."""
        a, b = np.triu_indices(self.n)
        out = np.zeros((self.n, self.n), dtype=complex)
        vals = self.data[: self.n_pp]
        out[a, b] = vals
        out[b, a] = vals
        return out

    # -- reductions ------------------------------------------------------
    def norm(self) -> float:
        return float(np.sqrt(self.norm_squared()))

    def norm_squared(self) -> float:
        d = self.data
        tot = 2.0 * np.vdot(d, d).real
        diag = d[row_offset(np.arange(self.n), self.n)]
        tot -= np.vdot(diag, diag).real
        qq = d[self._qq_diag()]
        tot -= np.vdot(qq, qq).real
        return float(tot)

    def inner(self, other: "TwoPhotonState") -> complex:
        """Weighted inner product <self|other>."""
        return complex(np.vdot(self.data, self.weights() * other.data))

    def region_probability(self, lo: int, hi: int) -> float:
        """Probability that both photons lie in sites ``[lo, hi)``."""
        lo, hi = max(0, int(lo)), min(self.n, int(hi))
        tot = 0.0
        for a in range(lo, hi):
            r = row_offset(a, self.n)
            row = self.data[r : r + (hi - a)]
            tot += 2.0 * np.vdot(row, row).real - abs(row[0]) ** 2
        return float(tot)

    def edge_probability(self, margin: int) -> float:
        """Probability that at least one excitation is a photon within ``margin`` of an edge."""
        n, m = self.n, int(margin)
        if m <= 0:
            return 0.0
        m = min(m, n)
        total = self.norm_squared()
        inner = self.region_probability(m, n - m) if n - 2 * m > 0 else 0.0
        pq = self.photon_qubit
        pq_inner = np.sum(np.abs(pq[m : n - m]) ** 2) if n - 2 * m > 0 else 0.0
        qq = self.data[self.n_pp + self.nq * self.n :]
        w_qq = np.full(qq.size, 2.0)
        i, j = np.triu_indices(self.nq)
        w_qq[i == j] = 1.0
        qq_mass = float(np.sum(w_qq * np.abs(qq) ** 2))
        return float(max(0.0, total - inner - 2.0 * pq_inner - qq_mass))

    def symmetry_defect(self, x1, x2) -> float:
        """max |psi(x1, x2) - psi(x2, x1)| via the public accessor (zero by construction)."""
        return float(np.max(np.abs(self.amplitude(x1, x2) - self.amplitude(x2, x1))))

    def copy(self) -> "TwoPhotonState":
        return TwoPhotonState(self.data.copy(), self.n, self.nq, self.hardcore, self.time, dict(self.meta))

    @classmethod
    def zeros(cls, geo: Geometry) -> "TwoPhotonState":
        return cls(np.zeros(geo.size, dtype=complex), geo.n, geo.nq, geo.hardcore)

    @classmethod
    def from_product(cls, phi_a: np.ndarray, phi_b: np.ndarray | None, geo: Geometry,
                     *, normalize: bool = True) -> "TwoPhotonState":
        """Symmetrized product of two one-excitation vectors (chain sites then qubits).

        ``phi_b = None`` means both photons share ``phi_a``.
        """
        n, nq = geo.n, geo.nq
        u = np.asarray(phi_a, dtype=complex)
        w = u if phi_b is None else np.asarray(phi_b, dtype=complex)
        if u.shape != (n + nq,) or w.shape != (n + nq,):
            raise ValueError("one-excitation vectors must have length n + nq")
        # psi(x1, x2) = [u(x1) w(x2) + w(x1) u(x2)] / 2 on every block
        data = np.empty(geo.size, dtype=complex)
        ux, wx = u[:n], w[:n]
        for a in range(n):
            r = row_offset(a, n)
            data[r : r + n - a] = 0.5 * (ux[a] * wx[a:] + wx[a] * ux[a:])
        off = n * (n + 1) // 2
        for j in range(nq):
            data[off + j * n : off + (j + 1) * n] = 0.5 * (ux * w[n + j] + wx * u[n + j])
        off += nq * n
        i, j = np.triu_indices(nq)
        data[off:] = 0.5 * (u[n + i] * w[n + j] + w[n + i] * u[n + j])
        st = cls(data, n, nq, geo.hardcore)
        if normalize:
            st.data /= st.norm()
        return st
