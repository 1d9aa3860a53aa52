"""Smooth cylinders: planar base curves and sections p = c + phi e3.

The base curve c(s) is arc-length parametrized in the e1e2-plane with
e1' = k e2, e2' = -k e1 and e3 fixed.  The section p = c + phi e3 is
planar for every curvature k solving phi' k^3 + phi''' k - phi'' k' = 0,
whose solutions are k = phi'' / sqrt(I - phi'^2).
"""
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .curves import plane_residual, torsion_residual
from .smooth_cone import FrameSamples, ProfileError, _kappa_samples, _values, check_grid

MARGIN = 1e-6


@dataclass(frozen=True)
class PlanarFrameSamples:
    grid: np.ndarray
    e1: np.ndarray
    e2: np.ndarray
    e3: np.ndarray
    c: np.ndarray


def planar_frame_integrate(kappa, grid, e1=(1.0, 0.0, 0.0), e2=(0.0, 1.0, 0.0), c0=(0.0, 0.0, 0.0)):
    """RK4 for e1' = k e2, e2' = -k e1, c' = e1; e3 = e1 x e2 is copied to
    every node unchanged."""
    g = check_grid(grid)
    e1 = np.asarray(e1, dtype=float)
    e2 = np.asarray(e2, dtype=float)
    E = np.vstack([e1, e2, np.cross(e1, e2)])
    if np.max(np.abs(E @ E.T - np.eye(3))) > 1e-12:
        raise ValueError("initial frame is not orthonormal")
    k0, km, k1 = _kappa_samples(kappa, g)
    S = _kernels.rk4_planar(g, k0, km, k1, np.vstack([e1, e2, np.asarray(c0, dtype=float)]))
    e3 = np.broadcast_to(E[2], (len(g), 3))
    return PlanarFrameSamples(g, S[:, 0], S[:, 1], e3, S[:, 2])


def cyl_values(phi, kappa, kappa_prime, grid):
    """phi' k^3 + phi''' k - phi'' k' pointwise."""
    g = np.asarray(grid, dtype=float)
    _, f1, f2, f3 = phi.jet(g)
    k = _values(kappa, g)
    kp = _values(kappa_prime, g)
    return f1 * k ** 3 + f3 * k - f2 * kp


def cyl_residual(phi, kappa, kappa_prime, grid):
    return float(np.max(np.abs(cyl_values(phi, kappa, kappa_prime, grid))))


@dataclass(frozen=True)
class PlanarCurvatureField:
    """k = phi'' / sqrt(I - phi'^2) on the feasible part of the grid."""
    phi: object
    I: float
    grid: np.ndarray

    def __call__(self, x):
        _, f1, f2, _ = self.phi.jet(np.asarray(x, dtype=float))
        return f2 / np.sqrt(self.I - f1 * f1)

    def prime(self, x):
        _, f1, f2, f3 = self.phi.jet(np.asarray(x, dtype=float))
        r = self.I - f1 * f1
        return f3 / np.sqrt(r) + f2 * f2 * f1 / r ** 1.5

    def values(self):
        return self(self.grid)


def feasible_run(phi, I_value, grid, margin=MARGIN):
    """Largest contiguous run of grid nodes (and step midpoints) with
    I - phi'^2 > margin, as a slice."""
    g = check_grid(grid)
    ok = I_value - phi.jet(g)[1] ** 2 > margin
    mid_ok = I_value - phi.jet(0.5 * (g[1:] + g[:-1]))[1] ** 2 > margin
    ok_step = ok[:-1] & ok[1:] & mid_ok
    best, start, cur = (0, 0), None, 0
    for i, v in enumerate(ok_step):
        if v:
            start = i if start is None else start
            if i + 1 - start > best[1] - best[0]:
                best = (start, i + 1)
        else:
            start = None
    if best[1] == best[0]:
        return None
    return slice(best[0], best[1] + 1)


def kappa_planar(phi, I_value, grid, margin=MARGIN):
    """Planar curvature field, trimmed to the largest feasible grid run.

    Raises ProfileError when no step of the grid is feasible."""
    g = check_grid(grid)
    run = feasible_run(phi, I_value, g, margin)
    if run is None:
        raise ProfileError("deformation parameter infeasible: I - phi'^2 <= 0 on the whole grid")
    return PlanarCurvatureField(phi, float(I_value), g[run])


def scaling_check(phi, lam, kappa, kappa_prime, grid):
    """(residual of lam*phi, lam * residual of phi) as signed pointwise arrays."""
    from .profiles import ProfileFunction, jet_scale
    scaled = ProfileFunction(lambda x: jet_scale(phi.jetf(x), lam), phi.domain,
                             "%g*%s" % (lam, phi.name))
    return (cyl_values(scaled, kappa, kappa_prime, grid),
            lam * cyl_values(phi, kappa, kappa_prime, grid))


def cylinder_section_planarity(kappa, phi, grid, spacing=1e-2):
    """Integrate the base curve, form p = c + phi e3 and report planarity."""
    fr = planar_frame_integrate(kappa, grid)
    p = fr.c + phi(fr.grid)[:, None] * fr.e3
    try:
        tors = torsion_residual(p, fr.grid, spacing)
    except ValueError:
        # a straight section has no osculating plane; it is planar
        tors = float("nan")
    return {"torsion": tors, "plane": plane_residual(p), "base_plane": plane_residual(fr.c),
            "points": p, "frames": fr}


def cylinder_mesh(frames, phi, height=None):
    """Quad strip between the base curve c and the section p."""
    from .mesh import Mesh
    n = len(frames.grid)
    top = frames.c + phi(frames.grid)[:, None] * frames.e3
    verts = np.vstack([frames.c, top])
    return Mesh(verts, [(i, i + 1, n + i + 1, n + i) for i in range(n - 1)])
