import numpy as np
import pytest

from grassgeo.errors import ChartEscape, OnPolarDivisor, ShapeMismatch
from grassgeo.grassmann import (
    Plane,
    Shape,
    base_point,
    distance,
    exp_map,
    frame_from_z,
    geodesic,
    in_chart,
    log_map,
    z_from_plane,
)
from grassgeo.loci import cut_time
from grassgeo.matfun import principal_angles
from grassgeo.sampling import complex_normal, random_block_unitary

from conftest import SHAPES, chart_of_frame, expm_frame, random_b, random_plane


def test_shape_fields():
    s = Shape(2, 3)
    assert (s.r, s.N, s.real_dim) == (2, 5, 12)
    with pytest.raises(ValueError):
        Shape(0, 1)


def test_plane_rejects_non_orthonormal():
    with pytest.raises(ValueError):
        Plane(np.array([[1.0], [1.0]]))
    with pytest.raises(ShapeMismatch):
        Plane(np.eye(2))


def test_plane_equality_is_up_to_reframing(rng):
    p = random_plane(rng, Shape(2, 3))
    w = np.array([[0, 1j], [1, 0]])
    assert p.isclose(Plane(p.frame @ w))
    assert not p.isclose(base_point(Shape(2, 3)))


def test_exp_map_examples():
    assert np.all(exp_map(np.zeros((2, 3))) == 0)
    assert exp_map(np.array([[np.pi / 4]]))[0, 0] == pytest.approx(1.0, abs=1e-15)


@pytest.mark.parametrize("n,m", SHAPES)
def test_exp_map_against_dense_exponential(rng, n, m):
    for _ in range(10):
        b = random_b(rng, n, m, smax=rng.uniform(0.1, 1.2))
        z = exp_map(b)
        oracle = chart_of_frame(expm_frame(b))
        assert np.abs(z - oracle).max() <= 1e-9
        np.testing.assert_allclose(
            np.linalg.svd(z, compute_uv=False), np.tan(np.linalg.svd(b, compute_uv=False)), rtol=1e-12
        )


def test_exp_map_chart_escape():
    with pytest.raises(ChartEscape):
        exp_map(np.array([[np.pi / 2]]))
    with pytest.raises(ChartEscape):
        exp_map(np.diag([0.1, 2.0]))


def test_log_map_examples():
    assert np.all(log_map(np.zeros((1, 2))) == 0)
    assert log_map(np.array([[1.0]]))[0, 0] == pytest.approx(np.pi / 4, abs=1e-15)


@pytest.mark.parametrize("n,m", [(2, 3), (3, 2), (1, 1)])
def test_log_then_exp_roundtrip(rng, n, m):
    for scale in [1e-3, 1.0, 10.0, 1e4]:
        z = complex_normal(rng, (n, m)) * scale
        b = log_map(z)
        assert np.linalg.norm(b, 2) < np.pi / 2
        assert np.abs(exp_map(b) - z).max() <= 1e-9 * max(1.0, scale)


def test_frame_from_z_examples():
    np.testing.assert_allclose(frame_from_z(np.zeros((2, 3))).frame, np.eye(5, 2), atol=0)
    np.testing.assert_allclose(
        frame_from_z(np.array([[1.0]])).frame, np.array([[1.0], [-1.0]]) / np.sqrt(2), atol=1e-15
    )


@pytest.mark.parametrize("n,m", SHAPES + [(3, 1)])
def test_frame_from_z_angles_are_arctan_of_singular_values(rng, n, m):
    o = base_point(Shape(n, m))
    for _ in range(10):
        z = complex_normal(rng, (n, m))
        angles = principal_angles(frame_from_z(z).frame, o.frame)
        s = np.zeros(n)
        s[: min(n, m)] = np.linalg.svd(z, compute_uv=False)
        np.testing.assert_allclose(angles, np.sort(np.arctan(s)), atol=1e-10)


def test_z_from_plane_examples(rng):
    assert np.all(np.abs(z_from_plane(base_point(Shape(2, 2)))) < 1e-15)
    with pytest.raises(OnPolarDivisor):
        z_from_plane(Plane(np.array([[0.0], [1.0]])))
    for _ in range(10):
        z = complex_normal(rng, (2, 3))
        assert np.abs(z_from_plane(frame_from_z(z)) - z).max() <= 1e-9


def test_z_from_plane_reproduces_plane(rng):
    for n, m in SHAPES:
        p = random_plane(rng, Shape(n, m))
        assert frame_from_z(z_from_plane(p)).isclose(p)


def test_geodesic_examples():
    s = Shape(2, 3)
    assert geodesic(complex_normal(np.random.default_rng(0), (2, 3)), 0.0).isclose(base_point(s))
    end = geodesic(np.array([[1.0]]), np.pi / 2)
    assert end.isclose(Plane(np.array([[0.0], [1.0]])))


@pytest.mark.parametrize("n,m", SHAPES + [(3, 2)])
def test_geodesic_matches_dense_exponential(rng, n, m):
    for _ in range(10):
        b = complex_normal(rng, (n, m))
        t = rng.uniform(-4, 4)
        frame = geodesic(b, t).frame
        assert np.abs(frame.conj().T @ frame - np.eye(n)).max() <= 1e-12
        # same frame, not just the same plane
        assert np.abs(frame - expm_frame(b, t)).max() <= 1e-10


@pytest.mark.parametrize("n,m", SHAPES)
def test_geodesic_chart_consistency(rng, n, m):
    for _ in range(20):
        b = random_b(rng, n, m)
        t = rng.uniform(0, 0.99) * (np.pi / 2) / np.linalg.norm(b, 2)
        assert np.abs(z_from_plane(geodesic(b, t)) - exp_map(t * b)).max() <= 1e-9


@pytest.mark.parametrize("n,m", SHAPES)
def test_radial_lines_are_geodesics(rng, n, m):
    b = random_b(rng, n, m, smax=1.0)
    for t in [1e-3, 0.1, 0.5, 1.2]:
        assert np.abs(log_map(z_from_plane(geodesic(b, t))) - t * b).max() <= 1e-9


def test_distance_examples():
    o = base_point(Shape(1, 1))
    assert distance(o, o) == 0.0
    assert distance(o, Plane(np.array([[0.0], [1.0]]))) == pytest.approx(np.pi / 2, abs=1e-15)
    with pytest.raises(ShapeMismatch):
        distance(o, base_point(Shape(1, 2)))


@pytest.mark.parametrize("n,m", SHAPES)
def test_unit_speed_before_cut(rng, n, m):
    o = base_point(Shape(n, m))
    for _ in range(10):
        b = random_b(rng, n, m)
        b /= np.linalg.norm(b)
        tc = cut_time(b)
        for t in np.linspace(0, tc, 7):
            assert distance(o, geodesic(b, t)) == pytest.approx(t, abs=1e-10)


@pytest.mark.parametrize("n,m", SHAPES)
def test_distance_metric_properties(rng, n, m):
    s = Shape(n, m)
    for _ in range(30):
        p, q, r = (random_plane(rng, s) for _ in range(3))
        k = random_block_unitary(rng, n, m)
        d = distance(p, q)
        assert d == pytest.approx(distance(q, p), abs=1e-12)
        assert d <= np.sqrt(n) * np.pi / 2 + 1e-12
        assert distance(p, r) <= distance(p, q) + distance(q, r) + 1e-9
        assert abs(distance(p.transform(k), q.transform(k)) - d) <= 1e-10
        assert distance(p, Plane(p.frame[:, ::-1])) <= 1e-7


@pytest.mark.parametrize("n,m", SHAPES)
def test_chart_or_polar_divisor_exclusive(rng, n, m):
    s = Shape(n, m)
    for _ in range(100):
        p = random_plane(rng, s)
        ok = True
        try:
            z_from_plane(p)
        except OnPolarDivisor:
            ok = False
        assert ok == in_chart(p)
