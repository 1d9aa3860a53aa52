"""Exact arithmetic: multiquadratic number fields and dense univariate polynomials.

Synthesized configurations contain square roots of rationals (the roots of
the quadratic branch factors), so exact checks run in Q(sqrt r1, ..., sqrt rk).
An element stores one rational coefficient per product of radicals.
"""
import math
from fractions import Fraction
from functools import reduce

RATIONAL = (int, Fraction)


def _is_square(q):
    q = Fraction(q)
    if q < 0:
        return False
    n, d = q.numerator, q.denominator
    return math.isqrt(n) ** 2 == n and math.isqrt(d) ** 2 == d


def _strip_squares(n, limit=1000):
    """n with small square factors removed (keeps radicands short)."""
    p = 2
    while p <= limit and p * p <= n:
        while n % (p * p) == 0:
            n //= p * p
        p += 1
    return n


def _rational_sqrt(q):
    q = Fraction(q)
    return Fraction(math.isqrt(q.numerator), math.isqrt(q.denominator))


class QuadField:
    """Q(sqrt r1, ..., sqrt rk) with basis sqrt(prod of r_i over each subset)."""

    def __init__(self, radicands=()):
        self.radicands = tuple(Fraction(r) for r in radicands)
        k = len(self.radicands)
        self.size = 1 << k
        # factor picked up when multiplying basis elements a and b
        self._mul = [[reduce(lambda x, i: x * self.radicands[i],
                             (i for i in range(k) if (a & b) >> i & 1), Fraction(1))
                      for b in range(self.size)] for a in range(self.size)]
        self._rad = [reduce(lambda x, i: x * self.radicands[i],
                            (i for i in range(k) if a >> i & 1), Fraction(1))
                     for a in range(self.size)]
        self._fsqrt = [math.sqrt(float(r)) for r in self._rad]

    def __eq__(self, other):
        return isinstance(other, QuadField) and self.radicands == other.radicands

    def __hash__(self):
        return hash(self.radicands)

    def __repr__(self):
        return "QuadField(%s)" % ", ".join(str(r) for r in self.radicands)

    def __call__(self, x):
        """Coerce a rational (or an element of a subfield) into this field."""
        if isinstance(x, Surd):
            if x.field == self:
                return x
            k = len(x.field.radicands)
            if x.field.radicands != self.radicands[:k]:
                raise ValueError("incompatible fields")
            return Surd(self, x.c + (Fraction(0),) * (self.size - x.field.size))
        return Surd(self, (Fraction(x),) + (Fraction(0),) * (self.size - 1))

    def basis(self, mask):
        c = [Fraction(0)] * self.size
        c[mask] = Fraction(1)
        return Surd(self, tuple(c))

    def sqrt(self, q):
        """sqrt(q) for rational q >= 0 if it lies in this field, else None."""
        q = Fraction(q)
        if q < 0:
            return None
        for mask in range(self.size):
            r = self._rad[mask]
            if _is_square(q * r):
                # sqrt(q) = sqrt(q r) * sqrt(r) / r
                return self.basis(mask) * (_rational_sqrt(q * r) / r)
        return None

    def adjoin(self, q):
        """Smallest extension of this field containing sqrt(q) (q >= 0 rational)."""
        q = Fraction(q)
        if q < 0:
            raise ValueError("negative radicand %s" % q)
        if self.sqrt(q) is not None:
            return self
        # keep radicands as integers: sqrt(n/d) = sqrt(n d)/d
        return QuadField(self.radicands + (Fraction(_strip_squares(q.numerator * q.denominator)),))


class Surd:
    """Element of a QuadField."""

    __slots__ = ("field", "c")

    def __init__(self, field, coeffs):
        self.field = field
        self.c = tuple(coeffs)

    def _coerce(self, other):
        if isinstance(other, Surd):
            if other.field is self.field or other.field == self.field:
                return other
            if len(other.field.radicands) > len(self.field.radicands):
                raise ValueError("mixed fields: lift the smaller operand first")
            return self.field(other)
        if isinstance(other, RATIONAL):
            return self.field(other)
        return NotImplemented

    def is_rational(self):
        return all(x == 0 for x in self.c[1:])

    def __bool__(self):
        return any(x != 0 for x in self.c)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self.c == o.c

    def __hash__(self):
        if self.is_rational():
            return hash(self.c[0])
        return hash(self.c)

    def __neg__(self):
        return Surd(self.field, tuple(-x for x in self.c))

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return Surd(self.field, tuple(a + b for a, b in zip(self.c, o.c)))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return Surd(self.field, tuple(a - b for a, b in zip(self.c, o.c)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, RATIONAL):
            return Surd(self.field, tuple(a * other for a in self.c))
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        n = self.field.size
        if n == 1:
            return Surd(self.field, (self.c[0] * o.c[0],))
        mul = self.field._mul
        out = [0] * n
        for a in range(n):
            x = self.c[a]
            if not x:
                continue
            row = mul[a]
            for b in range(n):
                y = o.c[b]
                if y:
                    out[a ^ b] += x * y * row[b]
        return Surd(self.field, tuple(Fraction(v) for v in out))

    __rmul__ = __mul__

    def conj(self, i):
        """Flip the sign of sqrt(r_i)."""
        return Surd(self.field, tuple(-x if (a >> i) & 1 else x for a, x in enumerate(self.c)))

    def inverse(self):
        if not self:
            raise ZeroDivisionError("inverse of zero field element")
        num = self.field(1)
        den = self
        for i in range(len(self.field.radicands)):
            cj = den.conj(i)
            num = num * cj
            den = den * cj
        return num * (1 / den.c[0])

    def __truediv__(self, other):
        if isinstance(other, RATIONAL):
            return self * (1 / Fraction(other))
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = self.field(1)
        for _ in range(k):
            out = out * self
        return out

    def __float__(self):
        return float(sum(float(x) * s for x, s in zip(self.c, self.field._fsqrt)))

    def __repr__(self):
        terms = []
        for mask, x in enumerate(self.c):
            if x:
                terms.append(str(x) if mask == 0 else "%s*sqrt(%s)" % (x, self.field._rad[mask]))
        return " + ".join(terms) or "0"


def is_exact(x):
    return isinstance(x, (int, Fraction, Surd))


def to_float(x):
    return float(x)


def common_field(values):
    """Largest QuadField among the Surd entries of `values` (or None)."""
    best = None
    for v in values:
        if isinstance(v, Surd) and (best is None or len(v.field.radicands) > len(best.radicands)):
            best = v.field
    return best


def lift_all(values):
    """Coerce a sequence of exact numbers into one common field if any Surd is present."""
    f = common_field(values)
    if f is None:
        return [Fraction(v) for v in values]
    return [f(v) for v in values]


def is_zero(x, tol=0.0):
    if is_exact(x):
        return not x
    return abs(x) <= tol


class UniPoly:
    """Dense univariate polynomial; coeffs[i] multiplies var**i.

    Coefficients can be any ring elements supporting + - * (Fractions, field
    elements, floats, or other UniPoly for bivariate tables).
    """

    __slots__ = ("coeffs", "var")

    def __init__(self, coeffs, var="x"):
        cs = list(coeffs)
        while cs and _iszero(cs[-1]):
            cs.pop()
        self.coeffs = cs
        self.var = var

    @property
    def degree(self):
        return len(self.coeffs) - 1  # -1 for the zero polynomial

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, UniPoly):
            return len(self.coeffs) == len(other.coeffs) and all(
                _iszero(a - b) for a, b in zip(self.coeffs, other.coeffs))
        if not self.coeffs:
            return _iszero(other)
        return self.degree == 0 and _iszero(self.coeffs[0] - other)

    def __hash__(self):
        return hash(tuple(self.coeffs))

    def coeff(self, i):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def lc(self):
        return self.coeffs[-1] if self.coeffs else 0

    def _lift(self, other):
        if isinstance(other, UniPoly):
            return other
        return UniPoly([other], self.var)

    def __add__(self, other):
        o = self._lift(other)
        n = max(len(self.coeffs), len(o.coeffs))
        return UniPoly([_add(self.coeff(i), o.coeff(i)) for i in range(n)], self.var)

    __radd__ = __add__

    def __neg__(self):
        return UniPoly([-c for c in self.coeffs], self.var)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, UniPoly):
            if _iszero(other):
                return UniPoly([], self.var)
            return UniPoly([c * other for c in self.coeffs], self.var)
        if not self.coeffs or not other.coeffs:
            return UniPoly([], self.var)
        out = [None] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if _iszero(a):
                continue
            for j, b in enumerate(other.coeffs):
                if _iszero(b):
                    continue
                out[i + j] = a * b if out[i + j] is None else out[i + j] + a * b
        return UniPoly([0 if c is None else c for c in out], self.var)

    __rmul__ = __mul__

    def __pow__(self, k):
        out = UniPoly([1], self.var)
        for _ in range(k):
            out = out * self
        return out

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def divmod(self, other):
        """Polynomial long division (coefficient field must support /)."""
        if not other.coeffs:
            raise ZeroDivisionError("division by zero polynomial")
        rem = list(self.coeffs)
        q = [0] * max(len(rem) - len(other.coeffs) + 1, 0)
        lc = other.coeffs[-1]
        for k in range(len(q) - 1, -1, -1):
            c = rem[k + len(other.coeffs) - 1] / lc
            q[k] = c
            if _iszero(c):
                continue
            for j, b in enumerate(other.coeffs):
                rem[k + j] = rem[k + j] - c * b
        return UniPoly(q, self.var), UniPoly(rem[:len(other.coeffs) - 1], self.var)

    def __repr__(self):
        return "UniPoly(%r, var=%r)" % (self.coeffs, self.var)


def _iszero(c):
    if isinstance(c, UniPoly):
        return not c.coeffs
    if isinstance(c, (Surd, int, Fraction)):
        return not c
    return c == 0


def _add(a, b):
    if _iszero(a):
        return b
    if _iszero(b):
        return a
    return a + b


def determinant(rows):
    """Determinant by Laplace expansion along the first row, skipping zeros.

    Works for any commutative ring entries (including UniPoly), which is all
    a 4x4 Sylvester matrix needs.
    """
    n = len(rows)
    if n == 1:
        return rows[0][0]
    if n == 2:
        return _sub(_mul(rows[0][0], rows[1][1]), _mul(rows[0][1], rows[1][0]))
    total = 0
    for j, a in enumerate(rows[0]):
        if _iszero(a):
            continue
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = _mul(a, determinant(minor))
        total = _add(total, term) if j % 2 == 0 else _sub(total, term)
    return total


def _mul(a, b):
    if _iszero(a) or _iszero(b):
        return 0
    return a * b


def _sub(a, b):
    if _iszero(b):
        return a
    if _iszero(a):
        return -b
    return a - b


def sylvester_matrix(p, q):
    """Sylvester matrix with the rows of q first (see `resultant`)."""
    m, n = p.degree, q.degree
    size = m + n
    rows = []
    for i in range(m):
        row = [0] * size
        for k, c in enumerate(reversed(q.coeffs)):
            row[i + k] = c
        rows.append(row)
    for i in range(n):
        row = [0] * size
        for k, c in enumerate(reversed(p.coeffs)):
            row[i + k] = c
        rows.append(row)
    return rows


def resultant(p, q):
    """Resultant of p and q via the Sylvester determinant.

    Normalized so that resultant(x - a, x - b) = b - a, i.e. it equals
    lc(q)**deg(p) times the product of p over the roots of q.
    """
    if p.degree < 1 and q.degree < 1:
        raise ValueError("degenerate resultant: both inputs are constant")
    if not p.coeffs or not q.coeffs:
        return 0
    if p.degree == 0:
        return p.coeffs[0] ** q.degree
    if q.degree == 0:
        return q.coeffs[0] ** p.degree
    return determinant(sylvester_matrix(p, q))
