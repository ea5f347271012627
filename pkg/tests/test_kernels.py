"""The numba kernels and the numpy fallbacks must agree bit for bit."""

import numpy as np
import pytest

from fpplab import kernels
from fpplab._accel import HAVE_NUMBA
from fpplab.lattice import Window
from fpplab.weights import Distribution, WeightField

needs_numba = pytest.mark.skipif(not HAVE_NUMBA, reason="numba not installed")


@needs_numba
@pytest.mark.parametrize("d", [2, 3])
def test_hash_parity(d):
    a = kernels.edge_uniforms(12345, (-4,) * d, 9, d, use_numba=True)
    b = kernels.edge_uniforms(12345, (-4,) * d, 9, d, use_numba=False)
    assert np.array_equal(a, b)
    assert (a > 0).all() and (a < 1).all()


@needs_numba
@pytest.mark.parametrize("dist", [Distribution.exponential(), Distribution.atom_mixture(0.3, 1.0)])
def test_dijkstra_parity(dist):
    w = Window((0, 0), 10)
    W = WeightField(dist, 7).window_weights(w)
    src = w.indices([(0, 0)])
    r1 = kernels.dijkstra(W, w.side, 2, src, use_numba=True)
    r2 = kernels.dijkstra(W, w.side, 2, src, use_numba=False)
    assert np.allclose(r1[0], r2[0], rtol=0, atol=1e-12)
    assert r1[3] == pytest.approx(r2[3], abs=1e-12)


@needs_numba
def test_saw_parity():
    w = Window((0, 0), 6)
    W = WeightField(Distribution.finite_discrete([0, 1, 3], [0.3, 0.4, 0.3]), 3).window_weights(w)
    o = w.index((0, 0))
    for m in range(1, 7):
        a = kernels.saw_min(W, w.side, 2, o, m, 10**7, use_numba=True)
        b = kernels.saw_min(W, w.side, 2, o, m, 10**7, use_numba=False)
        assert a == b


def test_uniform_stream_is_uniform():
    u = kernels.edge_uniforms(1, (0, 0), 200, 2).ravel()
    assert abs(u.mean() - 0.5) < 0.01
    assert abs((u < 0.1).mean() - 0.1) < 0.01
