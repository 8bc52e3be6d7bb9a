import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ptscatter.geometry import (
    DegenerateDirection,
    ScatteringGeometry,
    direction_at_angle,
    momentum_transfer,
    spherical_from_unit,
    symmetric_pair,
    unit_from_spherical,
)

Z = np.array([0.0, 0.0, 1.0])
angles = st.floats(-10.0, 10.0, allow_nan=False)


def random_unit(rng):
    v = rng.standard_normal(3)
    return v / np.linalg.norm(v)


@pytest.mark.parametrize(
    "theta, phi, expected",
    [
        (0.0, 1.234, [0, 0, 1]),
        (np.pi / 2, 0.0, [1, 0, 0]),
        (np.pi / 2, np.pi / 2, [0, 1, 0]),
    ],
)
def test_unit_from_spherical_examples(theta, phi, expected):
    np.testing.assert_allclose(unit_from_spherical(theta, phi), expected, atol=1e-15)


@given(angles, angles)
def test_unit_from_spherical_is_unit_and_round_trips(theta, phi):
    s = unit_from_spherical(theta, phi)
    assert abs(np.linalg.norm(s) - 1) < 1e-12
    t, p = spherical_from_unit(s)
    np.testing.assert_allclose(unit_from_spherical(t, p), s, atol=1e-12)


def test_unit_from_spherical_broadcasts():
    s = unit_from_spherical(np.linspace(0, np.pi, 5)[:, None], np.linspace(0, 2 * np.pi, 7)[None, :])
    assert s.shape == (5, 7, 3)


@pytest.mark.parametrize(
    "s, expected",
    [
        ([0, 0, 1], [0, 0, 0]),
        ([0, 0, -1], [0, 0, -2]),
        ([1, 0, 0], [1, 0, -1]),
    ],
)
def test_momentum_transfer_examples(s, expected):
    geom = ScatteringGeometry(1.0, Z)
    np.testing.assert_allclose(momentum_transfer(geom, s), expected, atol=1e-15)


def test_momentum_transfer_norm_identity():
    rng = np.random.default_rng(0)
    for _ in range(200):
        s0, s = random_unit(rng), random_unit(rng)
        k = rng.uniform(0.1, 10)
        K = momentum_transfer(ScatteringGeometry(k, s0), s)
        assert np.dot(K, K) == pytest.approx(2 * k**2 * (1 - s @ s0), rel=1e-12, abs=1e-12)
        assert np.linalg.norm(K) <= 2 * k * (1 + 1e-15)


def test_geometry_rejects_bad_wavenumber():
    with pytest.raises(ValueError):
        ScatteringGeometry(0.0, Z)


def test_momentum_transfer_rejects_non_unit():
    with pytest.raises(ValueError):
        momentum_transfer(ScatteringGeometry(1.0, Z), [1.0, 1.0, 0.0])


def test_symmetric_pair_mirror_example():
    geom = ScatteringGeometry(1.0, Z)
    t = np.pi / 4
    s1, s2 = symmetric_pair(geom, [np.sin(t), 0, np.cos(t)])
    np.testing.assert_allclose(s1, [np.sin(t), 0, np.cos(t)], atol=1e-15)
    np.testing.assert_allclose(s2, [-np.sin(t), 0, np.cos(t)], atol=1e-15)


def test_symmetric_pair_chord_at_right_angle():
    geom = ScatteringGeometry(1.0, Z)
    s1, s2 = symmetric_pair(geom, [1.0, 0.0, 0.0])
    K1, K2 = momentum_transfer(geom, s1), momentum_transfer(geom, s2)
    assert np.linalg.norm(K1 - K2) == pytest.approx(2.0, abs=1e-14)


def test_symmetric_pair_invariants():
    rng = np.random.default_rng(1)
    for _ in range(200):
        s0, s = random_unit(rng), random_unit(rng)
        k = rng.uniform(0.5, 3)
        geom = ScatteringGeometry(k, s0)
        s1, s2 = symmetric_pair(geom, s)
        theta = np.arccos(np.clip(s @ s0, -1, 1))
        assert abs(np.linalg.norm(s2) - 1) < 1e-12
        assert abs(s2 @ s0 - s1 @ s0) < 1e-12
        # s2 lies in the plane of s and s0, mirrored about s0
        np.testing.assert_allclose(s1 + s2, 2 * (s @ s0) * s0, atol=1e-12)
        K1, K2 = momentum_transfer(geom, s1), momentum_transfer(geom, s2)
        assert np.linalg.norm(K1 - K2) == pytest.approx(2 * k * np.sin(theta), rel=1e-10, abs=1e-12)


@pytest.mark.parametrize("s", [[0, 0, 1], [0, 0, -1], [1e-14, 0, 1]])
def test_symmetric_pair_degenerate(s):
    with pytest.raises(DegenerateDirection):
        symmetric_pair(ScatteringGeometry(1.0, Z), np.asarray(s) / np.linalg.norm(s))


@given(st.floats(0.0, np.pi))
@settings(max_examples=50)
def test_direction_at_angle(theta):
    s0 = np.array([1.0, 2.0, -0.5])
    s0 /= np.linalg.norm(s0)
    s = direction_at_angle(s0, theta)
    assert abs(np.linalg.norm(s) - 1) < 1e-12
    assert np.arccos(np.clip(s @ s0, -1, 1)) == pytest.approx(theta, abs=1e-7)
