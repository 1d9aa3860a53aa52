"""Closed-form flexible three-face germs of a discrete cone.

A germ is three faces f1, f2, f3 around the vertex V with f2 in the
xy-plane, r1 on the x-axis and r2 at angle mu.  Two cutting planes alpha and
beta meet the faces in edges a_i, b_i whose in-face angles are encoded by the
half-angle tangents s_j and t_j.  The germ folds about r1 (angle delta1) and
r2 (angle delta2).
"""
import math
from dataclasses import dataclass, replace, fields
from fractions import Fraction

import numpy as np

from .exact import QuadField, Surd, is_exact, is_zero, lift_all
from .geometry import det3, rot_r1, rot_r2, cos_sin_half


@dataclass(frozen=True)
class SectionConfig:
    m: object
    s1: object
    s2: object
    s3: object
    t1: object
    t2: object
    t3: object

    def side(self, w):
        """(m, w1, w2, w3) for w in {'s', 't'}."""
        if w == "s":
            return self.m, self.s1, self.s2, self.s3
        if w == "t":
            return self.m, self.t1, self.t2, self.t3
        raise ValueError("side must be 's' or 't'")

    def swap(self):
        """Exchange the roles of the two cutting planes."""
        return SectionConfig(self.m, self.t1, self.t2, self.t3, self.s1, self.s2, self.s3)

    def to_float(self):
        return SectionConfig(*(float(getattr(self, f.name)) for f in fields(self)))

    def is_exact(self):
        return all(is_exact(getattr(self, f.name)) for f in fields(self))

    def as_tuple(self):
        return tuple(getattr(self, f.name) for f in fields(self))

    @property
    def mu(self):
        return 2.0 * math.atan(float(self.m))


@dataclass(frozen=True)
class BranchSelector:
    u: int = 1
    v: int = 1
    mn: str = "M"

    def __post_init__(self):
        if self.u not in (1, 2) or self.v not in (1, 2):
            raise ValueError("u and v must be 1 or 2")
        if self.mn not in ("M", "N"):
            raise ValueError("mn must be 'M' or 'N'")

    def __str__(self):
        return "%s%d%d" % (self.mn, self.u, self.v)


ALL_SELECTORS = tuple(BranchSelector(u, v, mn) for u in (1, 2) for v in (1, 2) for mn in "MN")


@dataclass(frozen=True)
class FoldPair:
    """Fold tangents d_i = tan(delta_i/2); inf flags mean delta_i = pi."""
    d1: float = 0.0
    d2: float = 0.0
    inf1: bool = False
    inf2: bool = False

    @property
    def delta1(self):
        return math.pi if self.inf1 else 2.0 * math.atan(self.d1)

    @property
    def delta2(self):
        return math.pi if self.inf2 else 2.0 * math.atan(self.d2)

    @classmethod
    def from_angles(cls, delta1, delta2):
        def conv(a):
            if abs(abs(a) - math.pi) < 1e-15:
                return 0.0, True
            return math.tan(a / 2), False
        (d1, i1), (d2, i2) = conv(delta1), conv(delta2)
        return cls(d1, d2, i1, i2)


# ---------------------------------------------------------------- determinants

def edge_directions(config, fold, side="s"):
    """Folded edge directions (W1*, W2, W3*) of the a-side ('s') or b-side ('t')."""
    m, w1, w2, w3 = (float(x) for x in config.side(side))
    mu = 2.0 * math.atan(m)
    c1, s1 = cos_sin_half(w1)
    c2, s2 = cos_sin_half(w2)
    c3, s3 = cos_sin_half(w3)
    a1 = np.array([c1, s1, 0.0])
    a2 = np.array([c2, s2, 0.0])
    a3 = np.array([math.cos(mu) * c3 - math.sin(mu) * s3,
                   math.sin(mu) * c3 + math.cos(mu) * s3, 0.0])
    return rot_r1(fold.delta1) @ a1, a2, rot_r2(mu, fold.delta2) @ a3


def eval_D1(config, fold):
    """det(A1*, A2, A3*): zero iff the alpha-edges stay coplanar."""
    return float(det3(*edge_directions(config, fold, "s")))


def eval_D2(config, fold):
    """det(B1*, B2, B3*): zero iff the beta-edges stay coplanar."""
    return float(det3(*edge_directions(config, fold, "t")))


# ------------------------------------------------------------- branch factors

def side_factor(u, m, w1, w2, w3):
    """Branch factor S_u / T_u of one side (same polynomial for s and t)."""
    x = (w1 + w3) * (w1 * w3 + 1)
    z = (w1 - w3) * (w1 * w3 - 1)
    lin = w1 * (w3 * w3 + 1) * (w2 * w2 - 1) * m
    if u == 1:
        return w2 * x * m * m - lin + w2 * z
    if u == 2:
        return w2 * z * m * m + lin + w2 * x
    raise ValueError("branch index must be 1 or 2")


def eval_S(u, config):
    return side_factor(u, config.m, config.s1, config.s2, config.s3)


def eval_T(v, config):
    return side_factor(v, config.m, config.t1, config.t2, config.t3)


def eval_MN(selector, s1, s3, t1, t3):
    """Coupling factor M_{u,v} or N_{u,v} linking the two cutting planes."""
    same = selector.u == selector.v
    if selector.mn == "M":
        if same:
            return s1 * s3 * t1 - s1 * s3 * t3 - s1 * t1 * t3 + s3 * t1 * t3 - s1 + s3 + t1 - t3
        return (s1 * s3 * t1 * t3 + s1 * s3 + s1 * t1 - s1 * t3 - t1 * s3
                + s3 * t3 + t1 * t3 + 1)
    if same:
        return s1 * s3 * t1 + s1 * s3 * t3 - s1 * t1 * t3 - s3 * t1 * t3 + s1 + s3 - t1 - t3
    return (s1 * s3 * t1 * t3 - s1 * s3 + s1 * t1 + s1 * t3 + t1 * s3
            + s3 * t3 - t1 * t3 + 1)


# -------------------------------------------------------------------- solvers

class InfeasibleError(ValueError):
    """A closed-form sub-solve has no admissible solution."""


def _quadratic_coeffs(f):
    """(a, b, c) of a quadratic given as a callable, from f(0), f(1), f(-1)."""
    f0, fp, fm = f(0), f(1), f(-1)
    return (fp + fm) / 2 - f0, (fp - fm) / 2, f0


def quadratic_roots(a, b, c, field=None):
    """Real roots of a x^2 + b x + c in ascending order.

    Exact (rational) coefficients give exact roots in a QuadField; `field`
    can be passed so several solves share one field.
    """
    exact = all(is_exact(v) for v in (a, b, c))
    if exact:
        a, b, c = lift_all([a, b, c]) if field is None else [field(v) for v in (a, b, c)]
        if not a:
            return [] if not b else [-c / b]
        disc = b * b - 4 * a * c
        dq = disc.c[0] if isinstance(disc, Surd) and disc.is_rational() else disc
        if isinstance(dq, Surd):
            raise TypeError("exact solve needs a rational discriminant")
        if dq < 0:
            return []
        if field is not None:
            f = field
        else:
            f = (a.field if isinstance(a, Surd) else QuadField()).adjoin(dq)
            a, b = f(a), f(b)
        root = f.sqrt(dq)
        if root is None:
            raise ValueError("field %r does not contain sqrt(%s)" % (f, dq))
        r = sorted({(-b + root) / (2 * a), (-b - root) / (2 * a)}, key=float)
        return r
    a, b, c = float(a), float(b), float(c)
    if a == 0.0:
        return [] if b == 0.0 else [-c / b]
    disc = b * b - 4 * a * c
    if disc < 0:
        return []
    sq = math.sqrt(disc)
    # numerically stable pair
    q = -0.5 * (b + math.copysign(sq, b))
    roots = [q / a, c / q] if q != 0.0 else [0.0, 0.0]
    return sorted(set(roots))


def _side_discriminant(u, m, w1, w3):
    a, b, c = _quadratic_coeffs(lambda x: side_factor(u, m, w1, x, w3))
    return b * b - 4 * a * c


def solve_T_for_t2(v, m, t1, t3, field=None):
    """Roots t2 of T_v = 0 (ascending).  Empty means the branch is infeasible."""
    a, b, c = _quadratic_coeffs(lambda x: side_factor(v, m, t1, x, t3))
    return quadratic_roots(a, b, c, field)


def solve_S_for_s2(u, m, s1, s3, field=None):
    """Roots s2 of S_u = 0 (ascending)."""
    a, b, c = _quadratic_coeffs(lambda x: side_factor(u, m, s1, x, s3))
    return quadratic_roots(a, b, c, field)


def solve_MN_for_t3(selector, s1, s3, t1):
    """The t3 with M_{u,v} = 0 (or N_{u,v} = 0); the factor is affine in t3."""
    c0 = eval_MN(selector, s1, s3, t1, 0)
    k = eval_MN(selector, s1, s3, t1, 1) - c0
    if is_zero(k, 1e-14 * max(1.0, abs(float(c0)))):
        raise InfeasibleError("t₃ at infinity (τ₃ = π), reparametrize")
    return -c0 / k


def validate_exclusions(config, tol=1e-12):
    """Violated admissibility conditions, as human-readable labels."""
    out = []
    m = config.m
    if is_zero(m, tol):
        out.append("μ=0: rulings r₁, r₂ parallel")
    for letter, (_, w1, w2, w3) in (("A", config.side("s")), ("B", config.side("t"))):
        for j, w in ((1, w1), (2, w2), (3, w3)):
            if not is_exact(w) and not math.isfinite(float(w)):
                out.append("%s%s opposite its ruling (tangent infinite)" % (letter, "₁₂₃"[j - 1]))
        if is_zero(w1, tol):
            out.append("%s₁ along r₁" % letter)
        if is_zero(w3, tol):
            out.append("%s₃ along r₂" % letter)
        if is_zero(w2, tol):
            out.append("%s₂ along r₁" % letter)
        if is_zero(w2 - m, tol):
            out.append("%s₂ along r₂" % letter)
        if is_zero(m * w2 + 1, tol):
            out.append("%s₂ opposite r₂" % letter)
        if is_zero(w1 - w2, tol):
            out.append("%s₁, %s₂ identical: δ₁=0 coincidence" % (letter, letter))
        if is_zero(w1 * w2 + 1, tol):
            out.append("%s₁, %s₂ opposite: δ₁=0, opposite orientation" % (letter, letter))
        if is_zero(w1 + w2, tol):
            out.append("%s₁, %s₂ mirrored: δ₁=π coincidence" % (letter, letter))
        if is_zero(w1 * w2 - 1, tol):
            out.append("%s₁, %s₂ mirrored opposite: δ₁=π, opposite orientation" % (letter, letter))
    return out


def _factor_name(selector):
    sub = "₀₁₂"
    return "%s%s,%s" % (selector.mn, sub[selector.u], sub[selector.v])


def synthesize_config(selector, m, s1, s3, t1, t2_root=0, s2_root=0):
    """Closed-form flexible germ from the free data (m, s1, s3, t1).

    t3 solves the M/N factor, t2 the T_v factor and s2 the S_u factor; the
    two quadratic roots are picked by index (ascending order).  Rational
    inputs give an exact config over Q(sqrt(disc_t), sqrt(disc_s)).
    """
    free = (m, s1, s3, t1)
    exact = all(is_exact(x) for x in free)
    if exact:
        m, s1, s3, t1 = (Fraction(x) for x in free)
    else:
        m, s1, s3, t1 = (float(x) for x in free)
    t3 = solve_MN_for_t3(selector, s1, s3, t1)
    if is_zero(s3 - t3) or is_zero(s3 * t3 + 1):
        raise InfeasibleError("%s = 0 gives t₃ = %s: trivial parallel solution, s₃ and t₃ "
                              "describe parallel planes" % (_factor_name(selector), t3))
    field = None
    if exact:
        field = QuadField()
        for disc in (_side_discriminant(selector.v, m, t1, t3),
                     _side_discriminant(selector.u, m, s1, s3)):
            if disc >= 0:
                field = field.adjoin(disc)
    t2s = solve_T_for_t2(selector.v, m, t1, t3, field)
    if not t2s:
        raise InfeasibleError("T%s has no real root t₂ (branch infeasible)" % "₀₁₂"[selector.v])
    s2s = solve_S_for_s2(selector.u, m, s1, s3, field)
    if not s2s:
        raise InfeasibleError("S%s has no real root s₂ (branch infeasible)" % "₀₁₂"[selector.u])
    t2 = t2s[min(t2_root, len(t2s) - 1)]
    s2 = s2s[min(s2_root, len(s2s) - 1)]
    if exact:
        m, s1, s3, t1, t3 = (field(x) for x in (m, s1, s3, t1, t3))
    cfg = SectionConfig(m, s1, s2, s3, t1, t2, t3)
    bad = validate_exclusions(cfg)
    if bad:
        raise InfeasibleError("excluded case: " + "; ".join(bad))
    return cfg


# -------------------------------------------------------------- fold coupling

def coupling_forms(u, m, w1, w3):
    """Coefficients of the two fold relations of one side.

    P-type: p1*d1 + p2*d2 = 0 (returned as ('P', p1, p2));
    Q-type: q1*d1*d2 + q0 = 0 (returned as ('Q', q1, q0)).
    """
    if u == 1:
        p = (w1 * w3 + w1 * m + w3 * m - 1, -(w1 * w3 - w1 * m - w3 * m - 1))
        q = (w1 * w3 * m + w1 - w3 + m, -(w1 * w3 * m - w1 + w3 + m))
    else:
        p = (w1 * w3 * m - w1 - w3 - m, w1 * w3 * m + w1 + w3 - m)
        q = (w1 * w3 - w1 * m + w3 * m + 1, w1 * w3 + w1 * m - w3 * m + 1)
    return ("P",) + p, ("Q",) + q


def _mismatch(x, y):
    """Normalized 2x2 determinant; 0 iff the coefficient pairs are proportional."""
    x = [float(v) for v in x]
    y = [float(v) for v in y]
    nx, ny = math.hypot(*x), math.hypot(*y)
    if nx == 0.0 or ny == 0.0:
        return math.inf
    return abs(x[0] * y[1] - x[1] * y[0]) / (nx * ny)


@dataclass(frozen=True)
class Coupling:
    """The fold relation shared by both cutting planes."""
    kind: str       # 'P': k1*d1 + k2*d2 = 0, 'Q': k1*d1*d2 + k2 = 0
    k1: float
    k2: float
    mismatch: float

    def d2(self, d1):
        if self.kind == "P":
            if self.k2 == 0.0:
                raise InfeasibleError("fold at infinity (δ₂=π)")
            return -self.k1 * d1 / self.k2
        den = self.k1 * d1
        if den == 0.0:
            raise InfeasibleError("fold at infinity (δ₂=π)")
        return -self.k2 / den

    def delta2(self, delta1):
        """delta2 as an angle, continuous through delta2 = pi."""
        c, s = math.cos(delta1 / 2), math.sin(delta1 / 2)   # d1 = s / c
        if self.kind == "P":
            return 2.0 * math.atan2(-self.k1 * s, self.k2 * c)
        return 2.0 * math.atan2(-self.k2 * c, self.k1 * s)

    def residual(self, fold):
        """Homogenized relation at a fold state (handles infinite tangents)."""
        y1, x1 = (1.0, 0.0) if fold.inf1 else (fold.d1, 1.0)
        y2, x2 = (1.0, 0.0) if fold.inf2 else (fold.d2, 1.0)
        if self.kind == "P":
            val = self.k1 * y1 * x2 + self.k2 * y2 * x1
        else:
            val = self.k1 * y1 * y2 + self.k2 * x1 * x2
        return abs(val) / math.hypot(self.k1, self.k2)


def detect_coupling(config, selector, tol=1e-9):
    """Pick the relation (P or Q) that both sides share.

    The s-side uses index u, the t-side index v; a relation is shared when
    the two coefficient pairs are proportional.
    """
    cf = config.to_float()
    s_forms = coupling_forms(selector.u, cf.m, cf.s1, cf.s3)
    t_forms = coupling_forms(selector.v, cf.m, cf.t1, cf.t3)
    best = None
    for fs, ft in zip(s_forms, t_forms):
        mis = _mismatch(fs[1:], ft[1:])
        if best is None or mis < best.mismatch:
            k1, k2 = (float(x) for x in fs[1:])
            n = math.hypot(k1, k2)
            best = Coupling(fs[0], k1 / n, k2 / n, mis)
    if best is None or best.mismatch > tol:
        raise InfeasibleError("branch mismatch: no fold relation common to both planes "
                              "(best mismatch %.3g)" % (best.mismatch if best else math.inf))
    return best


def fold_coupling(config, selector, d1):
    """d2 on the common motion of both cutting planes for a given d1."""
    return detect_coupling(config, selector).d2(float(d1))


def flat_states(config, selector):
    """The two flat fold states of the coupled motion.

    A P-type relation passes through (0, 0) and (inf, inf); a Q-type relation
    through (0, inf) and (inf, 0).
    """
    c = detect_coupling(config, selector)
    if c.kind == "P":
        return [FoldPair(0.0, 0.0), FoldPair(0.0, 0.0, True, True)]
    return [FoldPair(0.0, 0.0, False, True), FoldPair(0.0, 0.0, True, False)]


def face_normals(config, fold):
    """Unit normals of f1, f2, f3 at a fold state."""
    mu = config.mu
    n2 = np.array([0.0, 0.0, 1.0])
    return rot_r1(fold.delta1) @ n2, n2, rot_r2(mu, fold.delta2) @ n2


def perturb(config, rel, names=("t2",)):
    """Copy with the named entries scaled by (1 + rel); used for negative controls."""
    cf = config.to_float()
    return replace(cf, **{n: getattr(cf, n) * (1.0 + rel) for n in names})
