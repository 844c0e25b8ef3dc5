import numpy as np
import pytest

from maxstable_lab import _pykernels, kernels
from maxstable_lab.ladder_flow import build_chain, initial_state_weights
from maxstable_lab.randkit import stream_keys

backends = kernels.available_backends()
needs_ext = pytest.mark.skipif("cython" not in backends, reason="compiled extension not built")


@pytest.fixture(scope="module")
def chain():
    return build_chain(0.75, 10**5)


def test_selected_backend_is_known():
    assert kernels.BACKEND in backends


@needs_ext
@pytest.mark.parametrize("n", [1, 7, 1000, 10**5])
def test_renewal_visits_identical(chain, n):
    k0, k1 = stream_keys(123, 4)
    cw = initial_state_weights(chain, n)
    a = _pykernels.renewal_visits(k0, k1, chain.return_cdf_table, cw, n, 300, 11)
    b = backends["cython"].renewal_visits(k0, k1, chain.return_cdf_table, cw, n, 300, 11)
    for x, y in zip(a, b):
        np.testing.assert_array_equal(np.asarray(x), np.asarray(y))


@needs_ext
def test_partial_maxima_identical(chain):
    n = 10**5
    k0, k1 = stream_keys(7, 0)
    cw = initial_state_weights(chain, n)
    rng = np.random.default_rng(0)
    w = rng.standard_normal(500)
    grid = np.array([0, 10, 25000, 50000, 100000], dtype=np.int64)
    a = _pykernels.partial_maxima(k0, k1, chain.return_cdf_table, cw, n, w, grid)
    b = backends["cython"].partial_maxima(k0, k1, chain.return_cdf_table, cw, n, w, grid)
    np.testing.assert_array_equal(np.asarray(a), np.asarray(b))
    assert a[0] == 0.0


def test_partial_maxima_against_direct_sum(chain):
    n = 3000
    k0, k1 = stream_keys(9, 2)
    cw = initial_state_weights(chain, n)
    w = np.linspace(-2, 2, 40)
    _, off, times = _pykernels.renewal_visits(k0, k1, chain.return_cdf_table, cw, n, 40, 0)
    X = np.zeros(n + 1)
    for j in range(40):
        X[times[off[j] : off[j + 1]]] += w[j]
    grid = np.arange(0, n + 1, 100, dtype=np.int64)
    want = np.maximum.accumulate(np.abs(X))[grid]
    got = kernels.partial_maxima(k0, k1, chain.return_cdf_table, cw, n, w, grid)
    np.testing.assert_allclose(np.asarray(got), want, rtol=1e-15, atol=0)
