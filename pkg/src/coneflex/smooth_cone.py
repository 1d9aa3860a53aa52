"""Smooth cones: Darboux frames, the planarity condition K and its solution.

A cone with vertex at the origin is lambda * e1(s) for an arc-length
parametrized spherical curve e1.  Its Darboux frame (e1, e2 = e1', e3)
obeys e1' = e2, e2' = -e1 + k e3, e3' = -k e2 with geodesic curvature k.
A curve p = phi(s) e1(s) on the cone stays planar under every isometric
deformation exactly when K(phi, k) = 0.

Many formulas are simpler in psi = 1/phi:
    Phi / phi^3 = psi + psi''    (Phi = phi^2 - phi phi'' + 2 phi'^2)
    integrand sum w = 2 phi' Phi / phi^5 = -(psi^2 + psi'^2)'
"""
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .curves import plane_residual, torsion_residual
from .profiles import ProfileFunction, jet_add, jet_recip, jet_scale


class ProfileError(ValueError):
    pass


# ------------------------------------------------------------------- frames

@dataclass(frozen=True)
class FrameSamples:
    grid: np.ndarray
    frames: np.ndarray      # (N, 3, 3), rows e1, e2, e3

    @property
    def e1(self):
        return self.frames[:, 0]

    @property
    def e2(self):
        return self.frames[:, 1]

    @property
    def e3(self):
        return self.frames[:, 2]

    def orthonormality_drift(self):
        """max |E E^T - I| over the grid."""
        g = np.einsum("nij,nkj->nik", self.frames, self.frames)
        return float(np.max(np.abs(g - np.eye(3))))


def check_grid(grid):
    g = np.asarray(grid, dtype=float)
    if g.ndim != 1 or len(g) < 2 or np.any(np.diff(g) <= 0):
        raise ValueError("grid must be strictly increasing with at least 2 nodes")
    return g


def check_frame(E, tol=1e-12):
    E = np.asarray(E, dtype=float).reshape(3, 3)
    if np.max(np.abs(E @ E.T - np.eye(3))) > tol:
        raise ValueError("initial frame is not orthonormal")
    return E


def _kappa_samples(kappa, g):
    """kappa at grid nodes and step midpoints; kappa may be a callable or a
    number."""
    if callable(kappa):
        kn = np.asarray(kappa(g), dtype=float) * np.ones_like(g)
        km = np.asarray(kappa(0.5 * (g[1:] + g[:-1])), dtype=float) * np.ones(len(g) - 1)
    else:
        kn = np.full_like(g, float(kappa))
        km = np.full(len(g) - 1, float(kappa))
    return kn[:-1], km, kn[1:]


def darboux_integrate(kappa, grid, frame0=None, orthonormalize=False):
    """RK4 solution of the Darboux frame equations on the grid.

    kappa: number, callable, or CurvatureField.  With orthonormalize=True the
    frame is re-orthonormalized after integration node by node (off by default
    so the drift can be measured)."""
    g = check_grid(grid)
    E0 = np.eye(3) if frame0 is None else check_frame(frame0)
    k0, km, k1 = _kappa_samples(kappa, g)
    frames = _kernels.rk4_darboux(g, k0, km, k1, E0)
    if orthonormalize:
        u, _, vt = np.linalg.svd(frames)
        frames = u @ vt
    return FrameSamples(g, frames)


# ---------------------------------------------------------------- condition K

def _values(f, g):
    if callable(f):
        return np.asarray(f(g), dtype=float) * np.ones_like(g)
    return np.full_like(g, float(f)) if np.ndim(f) == 0 else np.asarray(f, dtype=float)


def K_values(phi, kappa, kappa_prime, grid):
    """K pointwise; kappa/kappa_prime are numbers, arrays on the grid, or callables."""
    g = np.asarray(grid, dtype=float)
    f, f1, f2, f3 = phi.jet(g)
    k = _values(kappa, g)
    kp = _values(kappa_prime, g)
    big = f * f - f * f2 + 2 * f1 * f1
    return (big * f * kp
            + (k * k * f * f * f1 + f * f * f1 + f * f * f3 - 6 * f * f1 * f2 + 6 * f1 ** 3) * k)


def K_residual(phi, kappa, kappa_prime, grid):
    return float(np.max(np.abs(K_values(phi, kappa, kappa_prime, grid))))


def big_phi(phi, x):
    f, f1, f2, _ = phi.jet(x)
    return f * f - f * f2 + 2 * f1 * f1


def w_integrand(phi, x):
    """Sum of the six integrands of W (equals 2 phi' Phi / phi^5)."""
    f, f1, f2, _ = phi.jet(x)
    big = f * f - f * f2 + 2 * f1 * f1
    return (2 * f1 / (f * big) + 8 * f1 ** 3 / (f ** 3 * big) + 8 * f1 ** 5 / (f ** 5 * big)
            - 4 * f1 * f2 / (f * f * big) + 2 * f1 * f2 * f2 / (f ** 3 * big)
            - 8 * f1 ** 3 * f2 / (f ** 4 * big))


@dataclass(frozen=True)
class CurvatureField:
    """Geodesic curvature k(s) = Phi / (phi^3 sqrt(W)) for one value of I."""
    phi: ProfileFunction
    I: float
    grid: np.ndarray
    cum: np.ndarray         # integral of w from grid[0] to each node

    def W(self, x):
        x = np.asarray(x, dtype=float)
        g = self.grid
        j = np.clip(np.searchsorted(g, x, side="right") - 1, 0, len(g) - 2)
        a = g[j]
        mid = 0.5 * (a + x)
        part = (x - a) / 6.0 * (w_integrand(self.phi, a) + 4 * w_integrand(self.phi, mid)
                                + w_integrand(self.phi, x))
        return self.I + self.cum[j] + part

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        f = self.phi(x)
        return big_phi(self.phi, x) / (f ** 3 * np.sqrt(self.W(x)))

    def prime(self, x):
        x = np.asarray(x, dtype=float)
        f, f1, f2, f3 = self.phi.jet(x)
        big = f * f - f * f2 + 2 * f1 * f1
        bigp = 2 * f * f1 + 3 * f1 * f2 - f * f3
        W = self.W(x)
        sw = np.sqrt(W)
        w = w_integrand(self.phi, x)
        return (bigp / (f ** 3 * sw) - 3 * big * f1 / (f ** 4 * sw)
                - big * w / (2 * f ** 3 * W * sw))

    def values(self):
        return self(self.grid)


def cumulative_w(phi, grid):
    """Cumulative Simpson integral of w over each grid step (midpoint rule
    nodes, so every step is one Simpson panel)."""
    g = check_grid(grid)
    a, b = g[:-1], g[1:]
    panels = (b - a) / 6.0 * (w_integrand(phi, a) + 4 * w_integrand(phi, 0.5 * (a + b))
                              + w_integrand(phi, b))
    return np.concatenate([[0.0], np.cumsum(panels)])


def _check_profile(phi, g):
    f = phi(g)
    if np.any(f <= 0):
        raise ProfileError("profile must be positive on the grid")
    fm = phi(0.5 * (g[1:] + g[:-1]))
    big = np.concatenate([big_phi(phi, g), big_phi(phi, 0.5 * (g[1:] + g[:-1]))])
    scale = max(1.0, float(np.max(np.abs(np.concatenate([f, fm]))) ** 2))
    if np.any(np.abs(big) < 1e-12 * scale):
        raise ProfileError("degenerate profile: Phi = phi^2 - phi phi'' + 2 phi'^2 vanishes")


def feasible_I_range(phi, grid):
    """Open interval of I with W > 0 on the grid (upper end is infinite)."""
    g = check_grid(grid)
    _check_profile(phi, g)
    cum = cumulative_w(phi, g)
    return (float(-np.min(cum)), math.inf)


def kappa_from_profile(phi, I_value, grid):
    """Curvature field of the cone on which phi stays planar, for parameter I.

    W has lower integration limit grid[0]; the constant is part of I."""
    g = check_grid(grid)
    _check_profile(phi, g)
    cum = cumulative_w(phi, g)
    lo = float(np.min(cum)) + I_value
    mids = 0.5 * (g[1:] + g[:-1])
    field = CurvatureField(phi, float(I_value), g, cum)
    if lo <= 0 or np.any(field.W(mids) <= 0):
        raise ProfileError("I(η) too small: no real deformation (need I > %.17g)" % (-np.min(cum)))
    return field


def degenerate_solutions(phi_values, kappa_values, tol=1e-12):
    """Labels of the trivial solutions of K = 0 present in the samples."""
    out = []
    if np.all(np.abs(kappa_values) <= tol):
        out.append("kappa ≡ 0 (great-circle directrix, cone is a plane)")
    if np.all(np.abs(phi_values) <= tol):
        out.append("phi ≡ 0 (curve is the vertex)")
    return out


# ------------------------------------------------------- profile families

def _psi_jet(phi, x):
    return jet_recip(phi.jetf(x))


def _zero_check(values, x, what):
    v = np.asarray(values)
    bad = np.nonzero((np.abs(v[:-1]) < 1e-300) | (np.sign(v[:-1]) != np.sign(v[1:])))[0]
    if len(bad):
        raise ProfileError("%s vanishes near s = %.6g" % (what, x[bad[0]]))


def _check_points(domain, grid, n):
    if grid is not None:
        return np.asarray(grid, dtype=float)
    lo, hi = domain
    if math.isfinite(lo) and math.isfinite(hi):
        return np.linspace(lo, hi, n)
    return None


def phi1_from_phi2(phi2, C1, C2, sign=1, grid=None, check_grid_points=2001):
    """phi1 = phi2 / (phi2 (C1 sin s - C2 cos s) + sign), i.e.
    1/phi1 = (C1 sin s - C2 cos s) + sign/phi2.

    The denominator is checked for zeros on `grid`, or on the domain of phi2
    when that is bounded."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")

    def g_jet(x):
        s, c = np.sin(x), np.cos(x)
        return (C1 * s - C2 * c, C1 * c + C2 * s, -C1 * s + C2 * c, -C1 * c - C2 * s)

    def psi1(x):
        return jet_add(g_jet(x), jet_scale(_psi_jet(phi2, x), sign))

    xs = _check_points(phi2.domain, grid, check_grid_points)
    if xs is not None:
        _zero_check(psi1(xs)[0], xs, "denominator phi2 (C1 sin s - C2 cos s) ± 1")
    return ProfileFunction(lambda x: jet_recip(psi1(x)), phi2.domain,
                           "phi1(%s; %g, %g, %+d)" % (phi2.name, C1, C2, sign))


def pencil_profile(phi1, phi2, lam, grid=None, check_grid_points=2001):
    """phi = phi1 phi2 (lam - 1) / (lam phi1 - phi2); lam = inf gives phi2.

    In psi = 1/phi this is the affine combination (lam psi2 - psi1)/(lam - 1)."""
    if math.isinf(lam):
        return phi2
    if lam == 1:
        raise ProfileError("cross-ratio 1 maps every point to the vertex")

    def psi(x):
        return jet_scale(jet_add(jet_scale(_psi_jet(phi2, x), lam),
                                 jet_scale(_psi_jet(phi1, x), -1.0)), 1.0 / (lam - 1.0))

    domain = (max(phi1.domain[0], phi2.domain[0]), min(phi1.domain[1], phi2.domain[1]))
    xs = _check_points(domain, grid, check_grid_points)
    if xs is not None:
        _zero_check(psi(xs)[0], xs, "lam phi1 - phi2")
    return ProfileFunction(lambda x: jet_recip(psi(x)), domain,
                           "pencil(%s, %s, %g)" % (phi1.name, phi2.name, lam))


def U1_values(phi1, phi2, grid):
    """Phi1^2 phi2^6 - Phi2^2 phi1^6 pointwise."""
    g = np.asarray(grid, dtype=float)
    return big_phi(phi1, g) ** 2 * phi2(g) ** 6 - big_phi(phi2, g) ** 2 * phi1(g) ** 6


def U_residuals(phi1, phi2, I_samples, grid):
    """(max |U1|, max |U0|) over the grid.

    F(I) = Phi2^2 phi1^6 W1 - Phi1^2 phi2^6 W2 is affine in I (both W carry
    the same I); U0 is its intercept, found from two distinct I values."""
    vals = sorted(set(float(i) for i in I_samples))
    if len(vals) < 2:
        raise ValueError("need at least two distinct I values")
    g = check_grid(grid)
    Ia, Ib = vals[0], vals[-1]
    cum1, cum2 = cumulative_w(phi1, g), cumulative_w(phi2, g)
    a = big_phi(phi2, g) ** 2 * phi1(g) ** 6
    b = big_phi(phi1, g) ** 2 * phi2(g) ** 6
    Fa = a * (Ia + cum1) - b * (Ia + cum2)
    Fb = a * (Ib + cum1) - b * (Ib + cum2)
    slope = (Fb - Fa) / (Ib - Ia)
    U0 = Fa - slope * Ia
    U1 = U1_values(phi1, phi2, g)
    return float(np.max(np.abs(U1))), float(np.max(np.abs(U0)))


# ----------------------------------------------------------------- sections

def cone_section_planarity(kappa, phi, grid, frame0=None, spacing=1e-2):
    """Integrate the frame, sample p = phi e1 and report planarity."""
    fr = darboux_integrate(kappa, grid, frame0)
    p = phi(fr.grid)[:, None] * fr.e1
    kv = _values(kappa, fr.grid) if not isinstance(kappa, CurvatureField) else kappa(fr.grid)
    return {
        "torsion": torsion_residual(p, fr.grid, spacing),
        "plane": plane_residual(p),
        "drift": fr.orthonormality_drift(),
        "degenerate": degenerate_solutions(phi(fr.grid), kv),
        "points": p,
        "frames": fr,
    }


def cone_mesh(frames, radius=1.0, phi=None):
    """Triangle fan from the vertex through the samples of e1 (scaled by phi
    if given, else by radius)."""
    from .mesh import Mesh
    scale = phi(frames.grid) if phi is not None else np.full(len(frames.grid), radius)
    verts = np.vstack([np.zeros(3), scale[:, None] * frames.e1])
    faces = [(0, i, i + 1) for i in range(1, len(frames.grid))]
    return Mesh(verts, faces)
