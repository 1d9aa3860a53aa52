"""RK4 frame integrators.

Both kernels take curvature samples at the start, midpoint and end of every
step, so the caller decides how kappa is evaluated.  The numba versions are
used unless CONEFLEX_DISABLE_NUMBA is set to a non-empty value other than 0.
"""
import os

import numpy as np

try:
    from numba import njit
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False


def _darboux_rhs(E, k):
    # rows of E are e1, e2, e3
    out = np.empty_like(E)
    for j in range(3):
        out[0, j] = E[1, j]
        out[1, j] = -E[0, j] + k * E[2, j]
        out[2, j] = -k * E[1, j]
    return out


def rk4_darboux_py(grid, k0, km, k1, E0):
    """Integrate e1' = e2, e2' = -e1 + k e3, e3' = -k e2 over the grid.

    Returns an array (N, 3, 3) of frames (rows e1, e2, e3)."""
    n = grid.shape[0]
    out = np.empty((n, 3, 3))
    out[0] = E0
    E = E0.copy()
    for i in range(n - 1):
        h = grid[i + 1] - grid[i]
        a = _darboux_rhs(E, k0[i])
        b = _darboux_rhs(E + 0.5 * h * a, km[i])
        c = _darboux_rhs(E + 0.5 * h * b, km[i])
        d = _darboux_rhs(E + h * c, k1[i])
        E = E + (h / 6.0) * (a + 2.0 * b + 2.0 * c + d)
        out[i + 1] = E
    return out


def _planar_rhs(S, k):
    # rows of S are e1, e2, c
    out = np.empty_like(S)
    for j in range(3):
        out[0, j] = k * S[1, j]
        out[1, j] = -k * S[0, j]
        out[2, j] = S[0, j]
    return out


def rk4_planar_py(grid, k0, km, k1, S0):
    """Integrate e1' = k e2, e2' = -k e1, c' = e1; rows of S0 are e1, e2, c."""
    n = grid.shape[0]
    out = np.empty((n, 3, 3))
    out[0] = S0
    S = S0.copy()
    for i in range(n - 1):
        h = grid[i + 1] - grid[i]
        a = _planar_rhs(S, k0[i])
        b = _planar_rhs(S + 0.5 * h * a, km[i])
        c = _planar_rhs(S + 0.5 * h * b, km[i])
        d = _planar_rhs(S + h * c, k1[i])
        S = S + (h / 6.0) * (a + 2.0 * b + 2.0 * c + d)
        out[i + 1] = S
    return out


if HAVE_NUMBA:
    _darboux_rhs_jit = njit(cache=True)(_darboux_rhs)
    _planar_rhs_jit = njit(cache=True)(_planar_rhs)

    @njit(cache=True)
    def rk4_darboux_jit(grid, k0, km, k1, E0):
        n = grid.shape[0]
        out = np.empty((n, 3, 3))
        out[0] = E0
        E = E0.copy()
        for i in range(n - 1):
            h = grid[i + 1] - grid[i]
            a = _darboux_rhs_jit(E, k0[i])
            b = _darboux_rhs_jit(E + 0.5 * h * a, km[i])
            c = _darboux_rhs_jit(E + 0.5 * h * b, km[i])
            d = _darboux_rhs_jit(E + h * c, k1[i])
            E = E + (h / 6.0) * (a + 2.0 * b + 2.0 * c + d)
            out[i + 1] = E
        return out

    @njit(cache=True)
    def rk4_planar_jit(grid, k0, km, k1, S0):
        n = grid.shape[0]
        out = np.empty((n, 3, 3))
        out[0] = S0
        S = S0.copy()
        for i in range(n - 1):
            h = grid[i + 1] - grid[i]
            a = _planar_rhs_jit(S, k0[i])
            b = _planar_rhs_jit(S + 0.5 * h * a, km[i])
            c = _planar_rhs_jit(S + 0.5 * h * b, km[i])
            d = _planar_rhs_jit(S + h * c, k1[i])
            S = S + (h / 6.0) * (a + 2.0 * b + 2.0 * c + d)
            out[i + 1] = S
        return out
else:  # pragma: no cover
    rk4_darboux_jit = rk4_darboux_py
    rk4_planar_jit = rk4_planar_py


def use_numba():
    flag = os.environ.get("CONEFLEX_DISABLE_NUMBA", "")
    return HAVE_NUMBA and flag in ("", "0")


def rk4_darboux(grid, k0, km, k1, E0):
    f = rk4_darboux_jit if use_numba() else rk4_darboux_py
    return f(*(np.ascontiguousarray(a, dtype=np.float64) for a in (grid, k0, km, k1, E0)))


def rk4_planar(grid, k0, km, k1, S0):
    f = rk4_planar_jit if use_numba() else rk4_planar_py
    return f(*(np.ascontiguousarray(a, dtype=np.float64) for a in (grid, k0, km, k1, S0)))
