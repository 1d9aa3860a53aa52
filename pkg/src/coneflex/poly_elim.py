"""Algebraized coplanarity conditions and elimination of d1.

D1 (resp. D2) is turned into a polynomial in the fold tangents (d1, d2) by
the half-angle substitution.  Every rotation and every direction vector is
multiplied by its positive denominator, so the table entries are polynomials
in (m, s_j) resp. (m, t_j):

    D * (1+d1^2)(1+d2^2)(1+m^2)(1+w1^2)(1+w2^2)(1+w3^2) = sum c_ij d1^i d2^j.

Only c10, c01, c12 and c21 survive, which is why the d1-resultant is
d2^2 * (E4 d2^4 + E2 d2^2 + E0).
"""
from .exact import UniPoly, resultant, is_exact, is_zero, lift_all
from .geometry import det3

# rotation about x times (1+d^2), split by powers of d, applied to (a, b, 0)
_N = (
    lambda v: (v[0], v[1], 0 * v[0]),
    lambda v: (0 * v[0], 0 * v[0], 2 * v[1]),
    lambda v: (v[0], -v[1], 0 * v[0]),
)


def _planar(t):
    return (1 - t * t, 2 * t, 0 * t)


def side_params(which, config):
    """(m, w1, w2, w3) of the a-side (D1) or b-side (D2)."""
    if which in ("D1", 1, "a", "s"):
        return config.m, config.s1, config.s2, config.s3
    if which in ("D2", 2, "b", "t"):
        return config.m, config.t1, config.t2, config.t3
    raise ValueError("which must be 'D1' or 'D2', got %r" % (which,))


def coeff_table(m, w1, w2, w3):
    """3x3 table c[i][j] of d1^i d2^j for one side, denominators cleared."""
    vals = [m, w1, w2, w3]
    if all(is_exact(v) for v in vals):
        m, w1, w2, w3 = lift_all(vals)
    a1, a2, x = _planar(w1), _planar(w2), _planar(w3)
    mm = m * m
    zrow = ((1 - mm, -2 * m), (2 * m, 1 - mm))

    def zmul(v):
        return (zrow[0][0] * v[0] + zrow[0][1] * v[1],
                zrow[1][0] * v[0] + zrow[1][1] * v[1],
                (1 + mm) * v[2])

    left = [n(a1) for n in _N]
    right = [zmul(n(x)) for n in _N]
    return [[det3(left[i], a2, right[j]) for j in range(3)] for i in range(3)]


def coeffs_D(which, config, exact=None):
    """D1 or D2 as a UniPoly in d1 whose coefficients are UniPolys in d2.

    With exact=True every config entry must be an int, Fraction or field
    element; exact=None picks exact mode when that is the case.
    """
    vals = side_params(which, config)
    all_exact = all(is_exact(v) for v in vals)
    if exact and not all_exact:
        raise TypeError("exact coefficients need rational or field-element config entries")
    if exact is False and all_exact:
        vals = [float(v) for v in vals]
    table = coeff_table(*vals)
    return UniPoly([UniPoly(row, "d2") for row in table], "d1")


def denominator(which, config, d1, d2):
    """The positive factor cleared from D by `coeffs_D` (float)."""
    m, w1, w2, w3 = (float(v) for v in side_params(which, config))
    return ((1 + d1 * d1) * (1 + d2 * d2) * (1 + m * m)
            * (1 + w1 * w1) * (1 + w2 * w2) * (1 + w3 * w3))


def eval_table(poly, d1, d2):
    """Evaluate a coeffs_D result at float (d1, d2)."""
    return float(sum(float(c(d2)) * d1 ** i if isinstance(c, UniPoly) else 0.0
                     for i, c in enumerate(poly.coeffs)))


def eliminate_d1(config, exact=None):
    """Res_{d1}(D1, D2) as a UniPoly in d2 (Sylvester determinant)."""
    p = coeffs_D("D1", config, exact)
    q = coeffs_D("D2", config, exact)
    r = resultant(p, q)
    if not isinstance(r, UniPoly):
        r = UniPoly([r], "d2")
    return r


class StructureError(AssertionError):
    """The resultant does not have the even d2^2*(quartic) shape."""


def eval_E(config, exact=None, rtol=1e-9):
    """(E4, E2, E0) of the d1-eliminated condition E4 d2^4 + E2 d2^2 + E0.

    The Sylvester resultant equals d2^2 times that quartic; every other
    coefficient must vanish (exactly in exact mode, relative to rtol for
    floats), otherwise StructureError is raised.
    """
    r = eliminate_d1(config, exact)
    coeffs = [r.coeff(i) for i in range(9)]
    if r.degree > 8:
        raise StructureError("resultant degree %d exceeds 8" % r.degree)
    exact_mode = all(is_exact(c) for c in coeffs)
    scale = max((abs(float(c)) for c in coeffs), default=0.0)
    for i in (0, 1, 3, 5, 7, 8):
        c = coeffs[i]
        if exact_mode:
            bad = not is_zero(c)
        else:
            bad = abs(float(c)) > rtol * max(scale, 1e-300)
        if bad:
            raise StructureError("coefficient of d2^%d is %r, expected 0" % (i, c))
    return coeffs[6], coeffs[4], coeffs[2]


# factors of the common divisor of the s2-eliminants, with their meaning
_SPECIAL = (
    (lambda a, b: a - b, "flat-fold {side}-side, δ₁=0 case"),
    (lambda a, b: a * b + 1, "flat-fold {side}-side, δ₁=0, opposite orientation"),
    (lambda a, b: a + b, "flat-fold {side}-side, δ₁=π case"),
    (lambda a, b: a * b - 1, "flat-fold {side}-side, δ₁=π, opposite orientation"),
)


def classify_special_factor(config, tol=1e-12):
    """Labels of the vanishing special factors (w1-w2, w1w2+1, w1+w2, w1w2-1)."""
    labels = set()
    for side, w1, w2 in (("a", config.s1, config.s2), ("b", config.t1, config.t2)):
        for f, label in _SPECIAL:
            if is_zero(f(w1, w2), tol):
                labels.add(label.format(side=side))
    if is_zero(config.s3 - config.t3, tol) or is_zero(config.s3 * config.t3 + 1, tol):
        labels.add("trivial parallel solution (s₃, t₃)")
    return labels
