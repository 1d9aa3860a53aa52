import math

import numpy as np
from hypothesis import given, strategies as st

from coneflex.geometry import (EX, EY, EZ, angle_from_half, det3, fit_plane, half_angle, rot_axis,
                               rot_r1, rot_r2, rot_z, wrap_angle)

angles = st.floats(-10, 10, allow_nan=False)
vecs = st.lists(st.floats(-5, 5, allow_nan=False), min_size=3, max_size=3).map(np.array)


def test_rot_r1_identity_and_quarter_turn():
    assert np.array_equal(rot_r1(0.0), np.eye(3))
    assert np.allclose(rot_r1(math.pi / 2) @ EY, EZ, atol=1e-15)


def test_rot_r1_entries_at_sixty_degrees():
    c, s = 0.5, math.sqrt(3) / 2
    assert np.allclose(rot_r1(math.pi / 3), [[1, 0, 0], [0, c, -s], [0, s, c]], atol=1e-15)


def test_rot_r2_special_cases():
    for d in (0.3, -1.2, 2.9):
        assert np.allclose(rot_r2(0.0, d), rot_r1(d), atol=1e-15)
    assert np.allclose(rot_r2(0.7, 0.0), np.eye(3), atol=1e-15)


@given(angles, angles)
def test_rot_r2_fixes_axis_and_is_rotation(mu, d):
    R = rot_r2(mu, d)
    axis = np.array([math.cos(mu), math.sin(mu), 0.0])
    assert np.allclose(R @ axis, axis, atol=1e-12)
    assert np.allclose(R.T @ R, np.eye(3), atol=1e-12)
    assert abs(np.linalg.det(R) - 1) < 1e-12


@given(angles, angles)
def test_rot_r2_is_conjugated_rot_r1(mu, d):
    # independent construction: turn the x-axis onto r2
    Z = rot_z(mu)
    assert np.allclose(rot_r2(mu, d), Z @ rot_r1(d) @ Z.T, atol=1e-12)
    assert np.allclose(rot_r2(mu, d), rot_axis([math.cos(mu), math.sin(mu), 0], d), atol=1e-12)


@given(angles)
def test_rot_r1_inverse(d):
    assert np.allclose(rot_r1(d) @ rot_r1(-d), np.eye(3), atol=1e-12)


def test_det3_examples():
    assert det3(EX, EY, EZ) == 1
    assert det3((1, 2, 3), (4, 5, 6), (7, 8, 10)) == -3
    assert det3((1, 2, 3), (1, 2, 3), (4, 5, 6)) == 0


@given(vecs, vecs, vecs, vecs, st.floats(-3, 3))
def test_det3_multilinear_and_antisymmetric(u, v, w, x, a):
    lhs = det3(u + a * x, v, w)
    rhs = det3(u, v, w) + a * det3(x, v, w)
    assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs), abs(rhs)) * 100
    assert abs(det3(u, v, w) + det3(v, u, w)) <= 1e-12 * max(1.0, abs(det3(u, v, w)))


@given(st.floats(-math.pi + 1e-6, math.pi - 1e-6))
def test_half_angle_round_trip(theta):
    assert abs(angle_from_half(half_angle(theta)) - theta) < 1e-12


def test_wrap_angle_range():
    for a in np.linspace(-20, 20, 101):
        w = wrap_angle(a)
        assert -math.pi < w <= math.pi
        assert abs(math.remainder(w - a, 2 * math.pi)) < 1e-12


def test_fit_plane_residual_is_scale_free():
    rng = np.random.default_rng(1)
    pts = rng.normal(size=(30, 3))
    pts[:, 2] = 0.3 * pts[:, 0] - 0.1 * pts[:, 1] + 1
    plane, res = fit_plane(pts)
    assert res < 1e-14
    assert np.allclose(plane.distance(pts), 0, atol=1e-13)
    bumped = pts.copy()
    bumped[0, 2] += 0.5
    r1 = fit_plane(bumped)[1]
    r2 = fit_plane(10 * bumped)[1]
    assert r1 > 1e-3 and abs(r1 - r2) < 1e-12


def test_plane_reflection_is_involution():
    rng = np.random.default_rng(2)
    from coneflex.geometry import Plane
    pl = Plane(np.zeros(3), np.array([0.6, 0.0, 0.8]))
    pts = rng.normal(size=(10, 3))
    assert np.max(np.abs(pl.reflect(pl.reflect(pts)) - pts)) < 1e-14
