import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spherecorr import (
    CircleAngle,
    RngStream,
    UnitVector,
    chord_length,
    circle_distance,
    geodesic_distance,
    projective_distance,
)
from spherecorr.geometry import geodesic_accurate, reduce_angle, sample_uniform_many

E1 = UnitVector([1, 0, 0])
E2 = UnitVector([0, 1, 0])


def test_constructor_normalizes():
    v = UnitVector([3.0, 4.0])
    assert abs(np.linalg.norm(v.coords) - 1.0) <= 1e-12
    assert v.dim == 1


def test_constructor_rejects_bad_input():
    with pytest.raises(ValueError):
        UnitVector([1.0])
    with pytest.raises(ValueError):
        UnitVector([0.0, 0.0])
    with pytest.raises(ValueError):
        UnitVector([np.nan, 1.0])


def test_geodesic_basic_values():
    assert geodesic_distance(E1, E1.antipode()) == pytest.approx(np.pi, abs=1e-15)
    assert geodesic_distance(E1, E2) == pytest.approx(np.pi / 2, abs=1e-15)


def test_geodesic_simplex_corner_pair():
    # both cell corners of the cross-polytope cell in S^3: angle arccos(-1/2)
    x = UnitVector([1, 1, 1, 1])
    y = UnitVector([1, -1, -1, -1])
    assert geodesic_distance(x, y) == pytest.approx(np.arccos(-0.5), abs=1e-12)
    assert geodesic_distance(x, y) == pytest.approx(2 * np.pi / 3, abs=1e-12)


def test_dimension_mismatch_raises():
    with pytest.raises(ValueError):
        geodesic_distance(E1, UnitVector([1, 0]))
    with pytest.raises(ValueError):
        projective_distance(E1, UnitVector([1, 0]))


def test_projective_values():
    assert projective_distance(E1, E1.antipode()) == 0.0
    assert projective_distance(E1, E2) == pytest.approx(np.pi / 2, abs=1e-15)
    diag = UnitVector([1, 1, 0])
    # direct evaluation: arccos(1/sqrt(2))
    assert projective_distance(E1, diag) == pytest.approx(np.arccos(1 / np.sqrt(2)), abs=1e-12)
    assert projective_distance(E1, diag) == pytest.approx(np.pi / 4, abs=1e-12)


def test_circle_distance_values():
    assert circle_distance(CircleAngle(0.0), CircleAngle(np.pi)) == pytest.approx(np.pi, abs=1e-15)
    # direct arithmetic on the worked corner angles
    assert circle_distance(-np.pi / 24, 43 * np.pi / 24) == pytest.approx(np.pi / 6, abs=1e-12)
    assert circle_distance(7 * np.pi / 24, 35 * np.pi / 24) == pytest.approx(5 * np.pi / 6, abs=1e-12)


@given(st.floats(-50, 50), st.floats(-50, 50))
@settings(max_examples=200, deadline=None)
def test_circle_distance_properties(a, b):
    d = circle_distance(a, b)
    assert 0.0 <= d <= np.pi + 1e-12
    assert d == pytest.approx(circle_distance(b, a), abs=1e-12)
    # invariant under full turns of either argument
    assert circle_distance(a + 2 * np.pi, b) == pytest.approx(d, abs=1e-9)


@given(st.floats(-100, 100))
@settings(max_examples=200, deadline=None)
def test_reduce_angle_range(theta):
    t = reduce_angle(theta)
    assert 0.0 <= t < 2 * np.pi
    assert circle_distance(t, theta) <= 1e-9


def test_circle_angle_vector_roundtrip():
    for theta in (0.0, 1.0, np.pi, 5.5):
        back = CircleAngle.from_vector(CircleAngle(theta).to_vector())
        assert circle_distance(back, theta) <= 1e-12


def test_triangle_inequality_random_triples():
    rng = RngStream(11)
    xs = sample_uniform_many(4, 3000, rng.child(0))
    ys = sample_uniform_many(4, 3000, rng.child(1))
    zs = sample_uniform_many(4, 3000, rng.child(2))
    for i in range(0, 3000, 7):
        x, y, z = UnitVector(xs[i]), UnitVector(ys[i]), UnitVector(zs[i])
        assert geodesic_distance(x, z) <= geodesic_distance(x, y) + geodesic_distance(y, z) + 1e-12


def test_antipodal_invariance_exact():
    rng = RngStream(12)
    xs = sample_uniform_many(3, 500, rng.child(0))
    ys = sample_uniform_many(3, 500, rng.child(1))
    for i in range(500):
        x, y = UnitVector(xs[i]), UnitVector(ys[i])
        assert geodesic_distance(x.antipode(), y.antipode()) == geodesic_distance(x, y)


def test_projective_equals_folded_geodesic():
    rng = RngStream(13)
    xs = sample_uniform_many(5, 400, rng.child(0))
    ys = sample_uniform_many(5, 400, rng.child(1))
    for i in range(400):
        x, y = UnitVector(xs[i]), UnitVector(ys[i])
        d = geodesic_distance(x, y)
        assert projective_distance(x, y) == pytest.approx(min(d, np.pi - d), abs=1e-12)
        assert projective_distance(x.antipode(), y) == pytest.approx(
            projective_distance(x, y), abs=1e-15
        )


def test_chord_identity():
    rng = RngStream(14)
    xs = sample_uniform_many(3, 400, rng.child(0))
    ys = sample_uniform_many(3, 400, rng.child(1))
    for i in range(400):
        x, y = UnitVector(xs[i]), UnitVector(ys[i])
        d = geodesic_distance(x, y)
        assert 2 * np.sin(d / 2) == pytest.approx(chord_length(x, y), abs=1e-12)


def test_circle_distance_matches_embedded_geodesic():
    gen = RngStream(15).generator()
    for _ in range(400):
        a, b = gen.uniform(0, 2 * np.pi, 2)
        emb = geodesic_distance(CircleAngle(a).to_vector(), CircleAngle(b).to_vector())
        assert circle_distance(a, b) == pytest.approx(emb, abs=1e-12)


def test_geodesic_accurate_endpoints():
    x = np.array([1.0, 0.0, 0.0])
    assert geodesic_accurate(x, x) == 0.0
    assert geodesic_accurate(x, -x) == pytest.approx(np.pi, abs=1e-15)
    y = np.array([np.cos(1e-9), np.sin(1e-9), 0.0])
    assert geodesic_accurate(x, y) == pytest.approx(1e-9, rel=1e-6)


def test_sample_uniform_statistics():
    rng = RngStream(1)
    xs = sample_uniform_many(2, 100_000, rng)
    assert np.max(np.abs(np.linalg.norm(xs, axis=1) - 1.0)) <= 1e-12
    # law of large numbers: the mean of a rotation-invariant law vanishes
    assert np.max(np.abs(xs.mean(axis=0))) <= 0.02
    # symmetry: each halfspace holds half the mass
    assert abs(np.mean(xs[:, 0] > 0) - 0.5) <= 0.01


def test_sample_uniform_rejects_bad_dim():
    with pytest.raises(ValueError):
        sample_uniform_many(0, 5, RngStream(0))


def test_rng_stream_reproducibility():
    a = sample_uniform_many(3, 10, RngStream(5, (2,)))
    b = sample_uniform_many(3, 10, RngStream(5, (2,)))
    c = sample_uniform_many(3, 10, RngStream(5, (3,)))
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert RngStream(5).child(2) == RngStream(5, (2,))
