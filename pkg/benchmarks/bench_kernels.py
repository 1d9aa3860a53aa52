"""Compare the numba and pure-numpy RK4 frame kernels.

    python3 benchmarks/bench_kernels.py [n_steps]
"""
import sys
import time

import numpy as np

from coneflex import _kernels


def bench(f, args, repeat=5):
    f(*args)  # warm up (jit compile or cache load)
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = f(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(n=20000):
    grid = np.linspace(0.0, 10.0, n + 1)
    mid = 0.5 * (grid[1:] + grid[:-1])
    k = lambda s: 0.5 + 0.3 * np.sin(s)
    args = (grid, k(grid[:-1]), k(mid), k(grid[1:]), np.eye(3))
    print("steps: %d   numba available: %s" % (n, _kernels.HAVE_NUMBA))
    for name in ("rk4_darboux", "rk4_planar"):
        t_py, a = bench(getattr(_kernels, name + "_py"), args, repeat=2)
        t_jit, b = bench(getattr(_kernels, name + "_jit"), args)
        print("%-12s numpy %8.2f ms   numba %8.3f ms   speed-up %6.1fx   max diff %.1e"
              % (name, 1e3 * t_py, 1e3 * t_jit, t_py / t_jit, np.max(np.abs(a - b))))


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 20000)
