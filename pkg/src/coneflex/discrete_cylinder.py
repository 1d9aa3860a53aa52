"""Discrete cylinders: parallel fold lines, two planar sections.

Fold lines are parallel to the x-axis (m = 0).  The flexibility condition
R_i = 0 says that tan(sigma)/tan(tau) is the same for faces f1 and f_i, so
the beta-development is the alpha-development stretched along the rulings
and stays planar whenever the alpha-section does.
"""
import math
from dataclasses import dataclass, fields
from fractions import Fraction

import numpy as np

from .discrete_cone import (FoldPair, InfeasibleError, SectionConfig, eval_D1 as _cone_D1,
                            eval_D2 as _cone_D2, quadratic_roots)
from .exact import QuadField, UniPoly, is_exact, is_zero
from .geometry import fit_plane, wrap_angle
from .mesh import Mesh
from .poly_elim import StructureError, coeffs_D, eliminate_d1


@dataclass(frozen=True)
class CylinderConfig:
    s1: object
    s2: object
    s3: object
    t1: object
    t2: object
    t3: object
    spacing: float = 1.0

    def section(self):
        """The same data as a cone config with m = 0."""
        zero = self.s1 * 0
        return SectionConfig(zero, self.s1, self.s2, self.s3, self.t1, self.t2, self.t3)

    def to_float(self):
        return CylinderConfig(*(float(getattr(self, f.name)) for f in fields(self)))

    def is_exact(self):
        return all(is_exact(getattr(self, n)) for n in ("s1", "s2", "s3", "t1", "t2", "t3"))


def _R_coeffs(s1, si, t1):
    """(a, b, c) of R_i as a quadratic in t_i; note c = -a."""
    a = si * t1 * (s1 * s1 - 1)
    b = s1 * (1 - t1 * t1) * (si * si - 1)
    return a, b, -a


def eval_R(i, s1, si, t1, ti):
    if i not in (2, 3):
        raise ValueError("i must be 2 or 3")
    return (s1 * s1 * si * t1 * ti * ti - s1 * si * si * t1 * t1 * ti - s1 * s1 * si * t1
            + s1 * si * si * ti + s1 * t1 * t1 * ti - si * t1 * ti * ti - s1 * ti + si * t1)


def solve_R_for_ti(i, s1, si, t1, field=None):
    """Roots t_i of R_i = 0 (ascending).  The product of the roots is -1, so
    both are real and describe the same line with opposite orientation.
    When the t_i^2 coefficient vanishes (s1 = ±1, s_i = 0 or t1 = 0) R_i is
    affine and its single root is returned."""
    if i not in (2, 3):
        raise ValueError("i must be 2 or 3")
    a, b, c = _R_coeffs(s1, si, t1)
    if is_zero(a) and is_zero(b):
        raise ValueError("R%s vanishes identically in t%s" % ("₀₁₂₃"[i], "₀₁₂₃"[i]))
    return quadratic_roots(a, b, c, field)


def exclusions(config, tol=1e-12):
    """Violated admissibility conditions for m = 0, as labels."""
    out = []
    c = config
    for letter, w in (("s", (c.s1, c.s2, c.s3)), ("t", (c.t1, c.t2, c.t3))):
        if any(is_zero(x, tol) for x in w):
            out.append("%s₁%s₂%s₃ = 0: an edge along a ruling" % ((letter,) * 3))
        w1, w3 = w[0], w[2]
        for f, lab in ((w1 - w3, "−"), (w1 + w3, "+")):
            if is_zero(f, tol):
                out.append("%s₁%s%s₃ = 0: faces f1 and f3 parallel" % (letter, lab, letter))
        for f, lab in ((w1 * w3 + 1, "+"), (w1 * w3 - 1, "−")):
            if is_zero(f, tol):
                out.append("%s₁%s₃%s1 = 0: faces f1 and f3 parallel" % (letter, letter, lab))
    return out


def synthesize_cylinder(s1, s2, s3, t1, t2_root=0, t3_root=0, spacing=1.0):
    """Flexible cylinder germ from (s1, s2, s3, t1): t2, t3 solve R_2, R_3.

    Rational input gives an exact config over Q(sqrt(disc_2), sqrt(disc_3)).
    """
    free = (s1, s2, s3, t1)
    field = None
    if all(is_exact(x) for x in free):
        s1, s2, s3, t1 = (Fraction(x) for x in free)
        field = QuadField()
        for si in (s2, s3):
            a, b, _ = _R_coeffs(s1, si, t1)
            field = field.adjoin(b * b + 4 * a * a)
    else:
        s1, s2, s3, t1 = (float(x) for x in free)
    roots = [solve_R_for_ti(2, s1, s2, t1, field), solve_R_for_ti(3, s1, s3, t1, field)]
    for i, (r, k) in enumerate(zip(roots, (t2_root, t3_root)), start=2):
        if k >= len(r):
            raise InfeasibleError("R%s has %d root(s) in t%s, index %d requested"
                                  % ("₀₁₂₃"[i], len(r), "₀₁₂₃"[i], k))
    t2, t3 = roots[0][t2_root], roots[1][t3_root]
    if field is not None:
        s1, s2, s3, t1 = (field(x) for x in (s1, s2, s3, t1))
    cfg = CylinderConfig(s1, s2, s3, t1, t2, t3, spacing)
    bad = exclusions(cfg)
    if bad:
        raise InfeasibleError("excluded case: " + "; ".join(bad))
    return cfg


def eval_D1(config, fold):
    return _cone_D1(config.section(), fold)


def eval_D2(config, fold):
    return _cone_D2(config.section(), fold)


def fold_coupling_cyl(config, d2):
    """Real roots d1 of D1(., d2) = 0; empty past a motion limit."""
    poly = coeffs_D("D1", config.section().to_float(), exact=False)
    a, b, c = (float(poly.coeff(i)(d2)) if isinstance(poly.coeff(i), UniPoly) else 0.0
               for i in (2, 1, 0))
    return quadratic_roots(a, b, c)


def eval_E_cyl(config, exact=None):
    """(E2, E0) of the d1-eliminated condition.

    The Sylvester resultant is d2^2 (1 + d2^2) (E2 d2^2 + E0); the division is
    done exactly in exact mode and StructureError is raised if the remainder
    or an odd quotient coefficient is nonzero.
    """
    r = eliminate_d1(config.section(), exact)
    one = r.coeff(0) * 0 + 1 if r.degree >= 0 else 1
    zero = one * 0
    q, rem = r.divmod(UniPoly([zero, zero, one, zero, one], "d2"))
    exact_mode = all(is_exact(c) for c in r.coeffs)
    scale = max((abs(float(c)) for c in r.coeffs), default=0.0)
    tol = 0.0 if exact_mode else 1e-9 * max(scale, 1e-300)
    leftovers = [rem.coeff(i) for i in range(4)] + [q.coeff(1)] + [q.coeff(i) for i in range(3, q.degree + 1)]
    for c in leftovers:
        if not is_zero(c, tol):
            raise StructureError("resultant is not d2^2 (1+d2^2)(E2 d2^2 + E0): stray term %r" % (c,))
    return q.coeff(2), q.coeff(0)


# ------------------------------------------------------------- prism strips

@dataclass
class PrismStrip:
    config: CylinderConfig
    sigma: np.ndarray       # edge angle of the alpha-section in face k (index 1..n)
    tau: np.ndarray
    xa: np.ndarray          # ruling coordinate of a_k in the development
    xb: np.ndarray
    deltas: np.ndarray      # fold angle at ruling k (1..n-1)
    yz: np.ndarray          # cross-section position of ruling k
    a_points: np.ndarray
    b_points: np.ndarray

    @property
    def n(self):
        return len(self.xa) - 1

    def mesh(self):
        n = self.n
        verts = np.vstack([self.a_points, self.b_points])
        return Mesh(verts, [(k - 1, k, n + 1 + k, n + k) for k in range(1, n + 1)])

    def residuals(self):
        fold = FoldPair.from_angles(self.deltas[1], self.deltas[2])
        w = self.config.spacing
        widths = np.linalg.norm(np.diff(self.yz, axis=0), axis=1)
        iso = float(np.max(np.abs(widths - w)))
        for pts, x in ((self.a_points, self.xa), (self.b_points, self.xb)):
            dev = np.hypot(np.diff(x), w)
            iso = max(iso, float(np.max(np.abs(np.linalg.norm(np.diff(pts, axis=0), axis=1) - dev))))
        return {
            "alpha_planarity": fit_plane(self.a_points)[1],
            "beta_planarity": fit_plane(self.b_points)[1],
            "isometry": iso,
            "D1": abs(eval_D1(self.config, fold)),
            "D2": abs(eval_D2(self.config, fold)),
        }


def _angle_of(t):
    return 2.0 * math.atan(t)


def prism_development(config, n, normalized=False):
    """Edge angles and ruling coordinates of an n-face strip.

    The (sigma, tau) pairs of f1, f2, f3 repeat with period 3; every face then
    has the common ratio tan(sigma)/tan(tau).  With normalized=True the beta
    edges are orthogonal to the rulings.
    """
    cf = config.to_float()
    base_s = [_angle_of(cf.s1), _angle_of(cf.s2), _angle_of(cf.s3)]
    base_t = [_angle_of(cf.t1), _angle_of(cf.t2), _angle_of(cf.t3)]
    sigma = np.array([np.nan] + [base_s[(k - 1) % 3] for k in range(1, n + 1)])
    tau = np.array([np.nan] + [base_t[(k - 1) % 3] for k in range(1, n + 1)])
    if normalized:
        tau[1:] = math.pi / 2
    w = cf.spacing
    xa = np.zeros(n + 1)
    xb = np.zeros(n + 1)
    xb[1] = 1.0
    xa[0] = -w / math.tan(sigma[1])
    xb[0] = xb[1] - w / math.tan(tau[1])
    for k in range(2, n + 1):
        xa[k] = xa[k - 1] + w / math.tan(sigma[k])
        xb[k] = xb[k - 1] + w / math.tan(tau[k])
    return sigma, tau, xa, xb


def _yz(deltas, w):
    """Cross-section positions of the rulings for headings built from deltas."""
    n = len(deltas) - 1
    head = np.zeros(n + 1)        # heading of face k
    head[1] = deltas[1]
    for k in range(2, n + 1):
        head[k] = 0.0 if k == 2 else head[k - 1] + deltas[k - 1]
    yz = np.zeros((n + 1, 2))
    yz[0] = -w * np.array([math.cos(head[1]), math.sin(head[1])])
    for k in range(2, n + 1):
        yz[k] = yz[k - 1] + w * np.array([math.cos(head[k]), math.sin(head[k])])
    return head, yz


def _place(sigma, tau, xa, xb, w, config, delta2, prev):
    n = len(xa) - 1
    deltas = np.zeros(n + 1)
    deltas[2] = delta2
    d1s = fold_coupling_cyl(config, math.tan(delta2 / 2))
    if not d1s:
        raise InfeasibleError("no fold angle at r1 for delta2=%g (motion limit)" % delta2)
    deltas[1] = min((2 * math.atan(d) for d in d1s), key=lambda d: abs(wrap_angle(d - prev[1])))
    head, yz = _yz(deltas, w)
    pts = np.column_stack([xa, yz])
    normal = np.cross(pts[2] - pts[1], pts[3] - pts[2])
    if n >= 3 and np.linalg.norm(normal) < 1e-14:
        normal = np.cross(pts[1] - pts[0], pts[2] - pts[1])
    normal = normal / np.linalg.norm(normal)
    for k in range(3, n):
        # a_{k+1} = (xa, yz_k + w (cos h, sin h)) with h = head_k + delta
        A = normal[1] * w
        B = normal[2] * w
        C = normal @ np.array([xa[k + 1], yz[k, 0], yz[k, 1]]) - normal @ pts[1]
        r = math.hypot(A, B)
        if r < 1e-300 or abs(C) > r * (1 + 1e-12):
            raise InfeasibleError("no fold angle keeps the alpha-section planar at face %d" % (k + 1))
        base = math.atan2(B, A)
        off = math.acos(max(-1.0, min(1.0, -C / r)))
        cands = [wrap_angle(base + off - head[k]), wrap_angle(base - off - head[k])]
        deltas[k] = min(cands, key=lambda d: abs(wrap_angle(d - prev[k])))
        head[k + 1] = head[k] + deltas[k]
        yz[k + 1] = yz[k] + w * np.array([math.cos(head[k + 1]), math.sin(head[k + 1])])
        pts[k + 1] = [xa[k + 1], yz[k + 1, 0], yz[k + 1, 1]]
    return deltas, yz


def build_prism_strip(config, n, d2, normalized=False, max_step=0.01):
    """Fold an n-face strip to fold tangent d2 at r2.

    Root choices follow the motion from the flat state in steps of at most
    max_step radians of delta2.
    """
    if n < 3:
        raise ValueError("a strip needs at least 3 faces")
    cf = config.to_float()
    sigma, tau, xa, xb = prism_development(cf, n, normalized)
    if normalized:
        cf = CylinderConfig(cf.s1, cf.s2, cf.s3, 1.0, 1.0, 1.0, cf.spacing)
    w = cf.spacing
    target = 2.0 * math.atan(d2)
    steps = max(1, int(math.ceil(abs(target) / max_step)))
    deltas = np.zeros(n + 1)
    for i in range(1, steps + 1):
        deltas, yz = _place(sigma, tau, xa, xb, w, cf, target * i / steps, deltas)
    a_pts = np.column_stack([xa, yz])
    b_pts = np.column_stack([xb, yz])
    return PrismStrip(cf, sigma, tau, xa, xb, deltas, yz, a_pts, b_pts)
