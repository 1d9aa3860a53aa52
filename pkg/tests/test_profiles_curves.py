import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from coneflex.curves import TorsionError, plane_residual, torsion, torsion_residual
from coneflex.profiles import (LIBRARY, ProfileFunction, constant, exponential, harmonic_section,
                               jet_mul, jet_recip, make_profile, polynomial, reciprocal, trig)

X = np.linspace(-1, 1, 41)


@pytest.mark.parametrize("p", [trig(1, 0.3, -0.2, 1.7), exponential(0.5, -1.2, 1), polynomial([1, 2, -3, 0.5]),
                               harmonic_section(2, 0.3, 0.1, 1.1), reciprocal(exponential(1, 0.4))],
                         ids=lambda p: p.name)
def test_library_derivatives_match_fd(p):
    ok, worst = p.check_derivatives(X, 1e-6)
    assert ok, worst


def test_fd_fallback_from_callables():
    p = ProfileFunction.from_callables([np.sin, np.cos], (0.0, 2.0))
    f, f1, f2, f3 = p.jet(np.linspace(0.2, 1.8, 9))
    x = np.linspace(0.2, 1.8, 9)
    assert np.max(np.abs(f2 + np.sin(x))) < 1e-8
    assert np.max(np.abs(f3 + np.cos(x))) < 1e-6


@given(st.floats(-2, 2), st.floats(0.5, 3))
def test_jet_product_and_reciprocal(x, c):
    a = trig(c, 0.3, 0.1, 1.0).jetf(np.array(x))
    one = jet_mul(a, jet_recip(a))
    assert abs(one[0] - 1) < 1e-12
    assert all(abs(v) < 1e-10 for v in one[1:])


def test_make_profile():
    p = make_profile("trig", {"c0": 1.0, "a": 0.2})
    assert p(np.array(0.0)) == pytest.approx(1.2)
    assert make_profile("polynomial", [[1, 2]])(np.array(1.0)) == 3.0
    with pytest.raises(ValueError, match="unknown profile"):
        make_profile("spline", {})
    assert set(LIBRARY) >= {"constant", "neg_cos", "harmonic_section"}


def test_positive_on():
    assert constant(1).positive_on(X)
    assert not trig(0, 1).positive_on(X + 2)


def test_circle_torsion_zero():
    g = np.linspace(0, 6, 601)
    p = np.column_stack([np.cos(g), np.sin(g), 0 * g])
    assert torsion_residual(p, g) < 1e-8
    assert plane_residual(p) < 1e-15


@pytest.mark.parametrize("a,b", [(1.0, 1.0), (2.0, 0.5)])
def test_helix_torsion(a, b):
    g = np.linspace(0, 10, 5001)
    p = np.column_stack([a * np.cos(g), a * np.sin(g), b * g])
    _, tau = torsion(p, g)
    assert np.max(np.abs(tau - b / (a * a + b * b))) < 1e-8


def test_torsion_errors():
    g = np.linspace(0, 1, 5)
    with pytest.raises(TorsionError, match="torsion undefined"):
        torsion(np.zeros((5, 3)), g)
    g = np.linspace(0, 1, 50)
    with pytest.raises(TorsionError, match="torsion undefined"):
        torsion(np.column_stack([g, 2 * g, 0 * g]), g)
    with pytest.raises(TorsionError, match="uniform"):
        torsion(np.random.default_rng(0).normal(size=(50, 3)), g ** 2)


def test_third_order_fd_on_cubic():
    from coneflex.profiles import _fd
    assert _fd(lambda x: x ** 3, np.array(0.7), 0.01, 3) == pytest.approx(6.0, rel=1e-9)
    p = ProfileFunction.from_callables([lambda x: x ** 4], (0.0, 1.0))
    assert p.jet(np.array(0.5))[3] == pytest.approx(12.0, rel=1e-6)
