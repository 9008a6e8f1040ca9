import os

import numpy as np
import pytest

from grassgeo import _fallback, kernels
from grassgeo.grassmann import geodesic
from grassgeo.matfun import central_jacobian
from grassgeo.loci import projector_map, realify
from grassgeo.grassmann import Shape
from grassgeo.sampling import complex_normal

try:
    from grassgeo import _core
except ImportError:  # extension not built
    _core = None

BACKENDS = [_fallback] + ([_core] if _core is not None else [])
IDS = ["python"] + (["compiled"] if _core is not None else [])


@pytest.mark.parametrize("impl", BACKENDS, ids=IDS)
@pytest.mark.parametrize("n,m", [(1, 1), (1, 3), (2, 3), (3, 2), (3, 3)])
def test_projector_matches_geodesic(rng, impl, n, m):
    bs = complex_normal(rng, (8, n, m)) * 2
    bs[0] = 0
    bs[1] *= 1e-6  # exercises the small-argument series
    out = impl.projector_batch(bs)
    for b, proj in zip(bs, out):
        assert np.abs(proj - geodesic(b, 1.0).projector()).max() <= 1e-13


@pytest.mark.parametrize("impl", BACKENDS, ids=IDS)
def test_jacobian_matches_generic_route(rng, impl):
    s = Shape(2, 3)
    b = complex_normal(rng, (2, 3))
    fn = projector_map(s)
    for t in [0.0, 0.4, 2.5]:
        x = realify(t * b)
        step = 1e-5 * max(1.0, np.linalg.norm(x))
        ref = central_jacobian(fn, x, step)
        got = impl.projector_jacobians(b, [t])[0]
        assert got.shape == (2 * 25, 12)
        assert np.abs(got - ref).max() <= 1e-8


@pytest.mark.skipif(_core is None, reason="compiled extension not built")
def test_backends_agree(rng):
    b = complex_normal(rng, (2, 2))
    ts = np.linspace(0.01, 6, 200)
    assert np.abs(_core.projector_jacobians(b, ts) - _fallback.projector_jacobians(b, ts)).max() <= 1e-8
    bs = complex_normal(rng, (30, 3, 2))
    assert np.abs(_core.projector_batch(bs) - _fallback.projector_batch(bs)).max() <= 1e-13


@pytest.mark.parametrize("impl", BACKENDS, ids=IDS)
def test_empty_batches(impl):
    assert impl.projector_batch(np.zeros((0, 2, 2))).shape == (0, 4, 4)
    assert impl.projector_jacobians(np.zeros((2, 2)), []).shape == (0, 32, 8)


def test_backend_name():
    assert kernels.BACKEND in {"compiled", "python"}
    if _core is not None and not os.environ.get("GRASSGEO_PURE"):
        assert kernels.BACKEND == "compiled"
