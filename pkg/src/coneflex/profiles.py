"""Profile functions phi(s) with derivatives up to order 3.

A profile is stored as a jet function: x -> (f, f', f'', f''').  Products,
reciprocals and sums of jets are chained with the usual rules, so derived
profiles (the phi1 solution, pencil members) carry exact derivatives.
"""
import math
from dataclasses import dataclass

import numpy as np


# ------------------------------------------------------------ jet arithmetic

def jet_add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def jet_scale(a, c):
    return tuple(c * x for x in a)


def jet_mul(a, b):
    f, f1, f2, f3 = a
    g, g1, g2, g3 = b
    return (f * g,
            f1 * g + f * g1,
            f2 * g + 2 * f1 * g1 + f * g2,
            f3 * g + 3 * f2 * g1 + 3 * f1 * g2 + f * g3)


def jet_recip(a):
    f, f1, f2, f3 = a
    r = 1.0 / f
    r2 = r * r
    return (r,
            -f1 * r2,
            -f2 * r2 + 2 * f1 * f1 * r2 * r,
            -f3 * r2 + 6 * f1 * f2 * r2 * r - 6 * f1 ** 3 * r2 * r2)


def _fd(f, x, h, order):
    """4th-order central differences of order 1, 2 or 3."""
    if order == 1:
        return (f(x - 2 * h) - 8 * f(x - h) + 8 * f(x + h) - f(x + 2 * h)) / (12 * h)
    if order == 2:
        return (-f(x - 2 * h) + 16 * f(x - h) - 30 * f(x) + 16 * f(x + h) - f(x + 2 * h)) / (12 * h * h)
    if order == 3:
        return (f(x - 3 * h) - 8 * f(x - 2 * h) + 13 * f(x - h) - 13 * f(x + h)
                + 8 * f(x + 2 * h) - f(x + 3 * h)) / (8 * h ** 3)
    raise ValueError("order must be 1, 2 or 3")


@dataclass(frozen=True)
class ProfileFunction:
    jetf: object                 # x -> (f, f', f'', f''')
    domain: tuple = (-math.inf, math.inf)
    name: str = "profile"

    def jet(self, x):
        x = np.asarray(x, dtype=float)
        return tuple(np.broadcast_to(np.asarray(v, dtype=float), x.shape) for v in self.jetf(x))

    def __call__(self, x):
        return self.jet(x)[0]

    @classmethod
    def from_callables(cls, funcs, domain, name="profile"):
        """Profile from [f, f', ...]; missing orders are finite differences of
        the highest supplied derivative, with step 1e-4 * domain length."""
        funcs = list(funcs)
        if not funcs:
            raise ValueError("need at least the function itself")
        h = 1e-4 * (domain[1] - domain[0])
        top = len(funcs) - 1

        def jetf(x):
            out = [np.asarray(g(x), dtype=float) for g in funcs]
            for k in range(len(funcs), 4):
                out.append(_fd(funcs[top], x, h, k - top))
            return tuple(out)
        return cls(jetf, tuple(domain), name)

    def check_derivatives(self, x, rel=1e-6):
        """Largest mismatch between supplied derivatives and finite differences
        (relative to the magnitude of each derivative); returns (ok, worst)."""
        x = np.asarray(x, dtype=float)
        jets = self.jet(x)
        worst = 0.0
        for k in (1, 2, 3):
            lower = lambda y, k=k: self.jet(y)[k - 1]
            h = 1e-3 * max(1.0, float(np.max(np.abs(x))))
            fd = _fd(lower, x, h, 1)
            scale = max(1.0, float(np.max(np.abs(jets[k]))))
            worst = max(worst, float(np.max(np.abs(fd - jets[k]))) / scale)
        return worst < rel, worst

    def positive_on(self, x):
        return bool(np.all(self(x) > 0))


def _const_jet(x, c):
    z = np.zeros_like(x)
    return (z + c, z, z, z)


def constant(c, domain=(-math.inf, math.inf)):
    return ProfileFunction(lambda x: _const_jet(x, c), domain, "constant(%g)" % c)


def linear(a, b=0.0, domain=(-math.inf, math.inf)):
    """phi = a s + b."""
    def jetf(x):
        z = np.zeros_like(x)
        return (a * x + b, z + a, z, z)
    return ProfileFunction(jetf, domain, "linear(%g, %g)" % (a, b))


def trig(c0=0.0, a=1.0, b=0.0, omega=1.0, domain=(-math.inf, math.inf)):
    """phi = c0 + a cos(omega s) + b sin(omega s)."""
    def jetf(x):
        c, s = np.cos(omega * x), np.sin(omega * x)
        w = omega
        return (c0 + a * c + b * s,
                w * (-a * s + b * c),
                -w * w * (a * c + b * s),
                w ** 3 * (a * s - b * c))
    return ProfileFunction(jetf, domain, "trig(%g, %g, %g, %g)" % (c0, a, b, omega))


def neg_cos(domain=(-math.pi / 2, math.pi / 2)):
    """phi = -cos s."""
    p = trig(0.0, -1.0, 0.0, 1.0, domain)
    return ProfileFunction(p.jetf, domain, "neg_cos")


def exponential(a=1.0, k=1.0, c0=0.0, domain=(-math.inf, math.inf)):
    """phi = c0 + a exp(k s)."""
    def jetf(x):
        e = a * np.exp(k * x)
        return (c0 + e, k * e, k * k * e, k ** 3 * e)
    return ProfileFunction(jetf, domain, "exponential(%g, %g, %g)" % (a, k, c0))


def polynomial(coeffs, domain=(-math.inf, math.inf)):
    """phi = sum coeffs[i] s^i."""
    p = np.polynomial.Polynomial(coeffs)
    ds = [p, p.deriv(1), p.deriv(2), p.deriv(3)]
    return ProfileFunction(lambda x: tuple(d(x) for d in ds), domain,
                           "polynomial(%s)" % ",".join("%g" % c for c in coeffs))


def reciprocal(profile, name=None):
    return ProfileFunction(lambda x: jet_recip(profile.jetf(x)), profile.domain,
                           name or "1/(%s)" % profile.name)


def harmonic_section(A, B, C, omega, domain=(-math.inf, math.inf)):
    """phi = 1 / (A + B cos(omega s) + C sin(omega s)).

    For constant geodesic curvature k these are the planar sections of the
    cone when omega = sqrt(1 + k^2)."""
    return reciprocal(trig(A, B, C, omega, domain),
                      "harmonic_section(%g, %g, %g, %g)" % (A, B, C, omega))


LIBRARY = {
    "constant": constant,
    "linear": linear,
    "trig": trig,
    "neg_cos": neg_cos,
    "exponential": exponential,
    "polynomial": polynomial,
    "harmonic_section": harmonic_section,
}


def make_profile(kind, params=None):
    """Profile by library name with keyword (or positional list) parameters."""
    if kind not in LIBRARY:
        raise ValueError("unknown profile kind %r (known: %s)" % (kind, ", ".join(sorted(LIBRARY))))
    params = params or {}
    if isinstance(params, dict):
        p = dict(params)
        if "domain" in p:
            p["domain"] = tuple(p["domain"])
        return LIBRARY[kind](**p)
    return LIBRARY[kind](*params)
