import numpy as np

from mwphase.wqed.kernels import Geometry
from mwphase.wqed.state import TwoPhotonState


def _geo(hardcore=True):
    return Geometry(20, 1.0, np.array([8, 9, 10]), np.full(3, 0.2), np.zeros(3), hardcore)


def test_product_state_normalized_and_symmetric():
    geo = _geo()
    rng = np.random.default_rng(0)
    a = rng.normal(size=23) + 1j * rng.normal(size=23)
    b = rng.normal(size=23) + 1j * rng.normal(size=23)
    st = TwoPhotonState.from_product(a, b, geo)
    assert abs(st.norm() - 1.0) < 1e-14
    x = np.arange(20)
    assert st.symmetry_defect(x[:, None], x[None, :]) == 0.0
    dense = st.photon_photon_dense()
    assert np.array_equal(dense, dense.T)


def test_norm_matches_dense_first_quantized():
    geo = _geo(hardcore=False)
    rng = np.random.default_rng(2)
    a = rng.normal(size=23) + 1j * rng.normal(size=23)
    st = TwoPhotonState.from_product(a, None, geo, normalize=False)
    full = np.outer(a, a)
    assert abs(st.norm_squared() - np.sum(np.abs(full) ** 2)) < 1e-10 * np.sum(np.abs(full) ** 2)


def test_hardcore_removes_double_qubit():
    geo = _geo()
    a = np.ones(23, dtype=complex)
    st = TwoPhotonState.from_product(a, None, geo, normalize=False)
    assert np.all(np.diag(st.qubit_qubit) == 0)


def test_inner_product_and_region():
    geo = _geo(hardcore=False)
    a = np.zeros(23, dtype=complex)
    a[3] = a[15] = 1.0
    st = TwoPhotonState.from_product(a, None, geo)
    assert abs(st.inner(st) - 1.0) < 1e-14
    assert abs(st.region_probability(0, 20) - 1.0) < 1e-14
    assert abs(st.region_probability(0, 10) - 0.25) < 1e-14
    assert st.edge_probability(4) > 0.2
