"""Vectors, rotations, half-angle tangents and small plane utilities.

Vectors are plain length-3 numpy arrays and matrices are 3x3 arrays.  The
determinant helper is written out by cofactors so it also works on exact
number types (ints, Fractions, field elements).
"""
import math
from dataclasses import dataclass

import numpy as np

EX = np.array([1.0, 0.0, 0.0])
EY = np.array([0.0, 1.0, 0.0])
EZ = np.array([0.0, 0.0, 1.0])


def rot_r1(delta):
    """Rotation by `delta` about the x-axis (the ruling r1)."""
    c, s = math.cos(delta), math.sin(delta)
    return np.array([[1.0, 0.0, 0.0],
                     [0.0, c, -s],
                     [0.0, s, c]])


def rot_r2(mu, delta):
    """Rotation by `delta` about the axis (cos mu, sin mu, 0), written entrywise."""
    cm, sm = math.cos(mu), math.sin(mu)
    cd, sd = math.cos(delta), math.sin(delta)
    return np.array([
        [(1 - cm * cm) * cd + cm * cm, cm * sm * (1 - cd), sm * sd],
        [cm * sm * (1 - cd), (1 - sm * sm) * cd + sm * sm, -cm * sd],
        [-sm * sd, cm * sd, cd],
    ])


def rot_z(angle):
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rot_axis(axis, delta):
    """Rodrigues rotation about a unit axis."""
    k = np.asarray(axis, dtype=float)
    k = k / np.linalg.norm(k)
    kx = np.array([[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]])
    return np.eye(3) + math.sin(delta) * kx + (1 - math.cos(delta)) * (kx @ kx)


def det3(u, v, w):
    """Scalar triple product det(u, v, w) by cofactor expansion."""
    return (u[0] * (v[1] * w[2] - v[2] * w[1])
            - u[1] * (v[0] * w[2] - v[2] * w[0])
            + u[2] * (v[0] * w[1] - v[1] * w[0]))


def half_angle(theta):
    return math.tan(theta / 2)


def angle_from_half(t):
    return 2.0 * math.atan(t)


def cos_sin_half(t):
    """(cos theta, sin theta) from t = tan(theta/2); exact for rational t."""
    q = 1 + t * t
    return (1 - t * t) / q, 2 * t / q


def unit_dir(t):
    """Unit vector in the xy-plane at angle 2*atan(t)."""
    c, s = cos_sin_half(t)
    return np.array([float(c), float(s), 0.0])


def wrap_angle(a):
    """Wrap to (-pi, pi]."""
    return math.pi - (math.pi - a) % (2 * math.pi)


def normalize(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


@dataclass(frozen=True)
class Plane:
    point: np.ndarray
    normal: np.ndarray

    def distance(self, x):
        """Signed distance(s) of point(s) x from the plane."""
        return (np.asarray(x, dtype=float) - self.point) @ self.normal

    def reflect(self, x):
        """Mirror point(s) x in the plane."""
        x = np.asarray(x, dtype=float)
        d = self.distance(x)
        return x - 2.0 * np.multiply.outer(d, self.normal)

    def reflect_dir(self, v):
        v = np.asarray(v, dtype=float)
        return v - 2.0 * np.multiply.outer(v @ self.normal, self.normal)


def plane_from_points(p0, p1, p2):
    n = np.cross(np.asarray(p1) - p0, np.asarray(p2) - p0)
    return Plane(np.asarray(p0, dtype=float), normalize(n))


def fit_plane(points):
    """Least-squares plane of a point cloud.

    Returns (plane, residual) where residual is the largest point distance to
    the plane divided by the diameter of the point set.
    """
    pts = np.asarray(points, dtype=float)
    c = pts.mean(axis=0)
    _, _, vt = np.linalg.svd(pts - c)
    n = vt[-1]
    dist = np.abs((pts - c) @ n)
    return Plane(c, n), float(dist.max() / max(diameter(pts), 1e-300))


def diameter(pts, chunk=512):
    """Largest pairwise distance, computed in row blocks to bound memory."""
    pts = np.asarray(pts, dtype=float)
    best = 0.0
    for i in range(0, len(pts), chunk):
        blk = pts[i:i + chunk]
        d2 = np.sum((blk[:, None, :] - pts[None, :, :]) ** 2, axis=-1)
        best = max(best, float(d2.max()))
    return math.sqrt(best)


def line_ray_param(p, d, u):
    """Solve p + lam*d = rho*u in a plane (2D or xy of 3D); returns (lam, rho)."""
    a = np.array([[d[0], -u[0]], [d[1], -u[1]]], dtype=float)
    lam, rho = np.linalg.solve(a, -np.asarray(p[:2], dtype=float))
    return float(lam), float(rho)
