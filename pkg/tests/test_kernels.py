import numpy as np
import pytest

from mwphase.errors import ValidationError
from mwphase.wqed.kernels import BACKEND, COMPILED, PYTHON, Geometry, packed_operator, pair_index


def _geo(hardcore=True, n=30):
    return Geometry(n, 1.0, np.array([12, 14, 16]), np.array([0.3, 0.2, 0.3]),
                    np.array([0.1, -0.05, 0.1]), hardcore)


def test_pair_index_symmetric_and_dense():
    n = 7
    a, b = np.triu_indices(n)
    idx = pair_index(a, b, n)
    assert np.array_equal(idx, np.arange(n * (n + 1) // 2))
    assert np.array_equal(pair_index(b, a, n), idx)


@pytest.mark.parametrize("hardcore", [True, False])
def test_operator_hermitian(hardcore):
    op = packed_operator(_geo(hardcore))
    geo = _geo(hardcore)
    # Hermitian with respect to the multiplicity-weighted inner product
    from mwphase.wqed.state import TwoPhotonState

    w = TwoPhotonState.zeros(geo).weights()
    dense = op.toarray()
    lhs = w[:, None] * dense
    assert np.allclose(lhs, lhs.conj().T, atol=1e-13)


@pytest.mark.skipif(COMPILED is None, reason="compiled kernels unavailable")
@pytest.mark.parametrize("hardcore", [True, False])
def test_compiled_matches_python(hardcore):
    from mwphase.wqed.evolve import _interval
    from mwphase.wqed.state import TwoPhotonState

    geo = _geo(hardcore)
    rng = np.random.default_rng(1)
    # the state constructor removes doubly excited qubits in the hard-core case
    psi = TwoPhotonState(rng.normal(size=geo.size) + 1j * rng.normal(size=geo.size),
                         geo.n, geo.nq, hardcore).data
    assert np.allclose(COMPILED.apply_h2(psi, geo), PYTHON.apply_h2(psi, geo), atol=1e-13)
    lo, hi = geo.single_particle_bounds()
    scale, center = _interval(2 * lo, 2 * hi)
    c = rng.normal(size=20) + 1j * rng.normal(size=20)
    a = COMPILED.chebyshev_series(psi, c, scale, center, geo)
    b = PYTHON.chebyshev_series(psi, c, scale, center, geo)
    assert np.allclose(a, b, atol=1e-11)


def test_backend_name():
    assert BACKEND in ("cython", "python")


def test_geometry_validation():
    with pytest.raises(ValidationError):
        Geometry(10, 1.0, np.array([2, 2]), np.ones(2), np.zeros(2), True)
    with pytest.raises(ValidationError):
        Geometry(10, 1.0, np.array([2, 12]), np.ones(2), np.zeros(2), True)


def test_pure_python_env_switch():
    import subprocess
    import sys

    out = subprocess.run(
        [sys.executable, "-c", "from mwphase.wqed.kernels import BACKEND; print(BACKEND)"],
        env={"MWPHASE_PURE_PYTHON": "1", "PATH": ""}, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "python"
