"""Sampled space curves: finite-difference torsion and planarity."""
import numpy as np

from .geometry import fit_plane


class TorsionError(ValueError):
    pass


def _stencil_derivs(p, h, s):
    """First three derivatives at the centres of a 7-point stencil with
    spacing s*h (4th-order central differences)."""
    n = len(p)
    idx = np.arange(3 * s, n - 3 * s)
    f = lambda k: p[idx + k * s]
    H = h * s
    d1 = (f(-2) - 8 * f(-1) + 8 * f(1) - f(2)) / (12 * H)
    d2 = (-f(-2) + 16 * f(-1) - 30 * f(0) + 16 * f(1) - f(2)) / (12 * H * H)
    d3 = (f(-3) - 8 * f(-2) + 13 * f(-1) - 13 * f(1) + 8 * f(2) - f(3)) / (8 * H ** 3)
    return idx, d1, d2, d3


def torsion(points, grid, spacing=1e-2, min_cross=1e-8):
    """Torsion (p' x p'').p''' / |p' x p''|^2 at the stencil centres.

    The grid must be uniform.  Differences use a stride chosen so that the
    stencil spacing is close to `spacing` (third derivatives amplify rounding
    badly at tiny steps).  Returns (grid values, torsion)."""
    p = np.asarray(points, dtype=float)
    g = np.asarray(grid, dtype=float)
    if len(p) < 7:
        raise TorsionError("torsion undefined: need at least 7 samples")
    steps = np.diff(g)
    h = steps.mean()
    if np.max(np.abs(steps - h)) > 1e-9 * max(1.0, abs(h)):
        raise TorsionError("torsion undefined: grid must be uniform")
    s = max(1, int(round(spacing / abs(h))))
    s = min(s, (len(p) - 1) // 6)
    idx, d1, d2, d3 = _stencil_derivs(p, h, s)
    cr = np.cross(d1, d2)
    n2 = np.sum(cr * cr, axis=1)
    if np.any(n2 < min_cross ** 2):
        raise TorsionError("torsion undefined: |p' x p''| below %g" % min_cross)
    return g[idx], np.sum(cr * d3, axis=1) / n2


def torsion_residual(points, grid, spacing=1e-2):
    """max |torsion| over the sampled curve."""
    return float(np.max(np.abs(torsion(points, grid, spacing)[1])))


def plane_residual(points):
    """Largest distance to the least-squares plane over the diameter."""
    return fit_plane(np.asarray(points, dtype=float))[1]
