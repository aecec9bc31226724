"""Compare the compiled and pure-Python Dormand-Prince kernels.

Usage: python3 benchmarks/bench_kernel.py [T]
"""
import sys
import time

import numpy as np

from dicke_boa.classical import dynamics
from dicke_boa.model import ModelParams


def bench(backend, state, params, T, repeat=3):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        tr = dynamics.integrate(state, params, T, 0.05, backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, tr


def main():
    T = float(sys.argv[1]) if len(sys.argv) > 1 else 50.0
    params = ModelParams.from_f(1.0, 1.0, 2.0, 10)
    state = dynamics.energy_shell_initials(-1.4 * params.j, params, 8, 8)[0][2]
    t_py, tr_py = bench("python", state, params, T, repeat=1)
    print(f"python  T={T:g}: {t_py:.3f} s, {tr_py.steps} steps")
    if dynamics._compiled is None:
        print("compiled kernel not built; only the Python timing is available")
        return
    t_c, tr_c = bench("cython", state, params, T)
    diff = np.max(np.abs(tr_c.states - tr_py.states))
    print(f"cython  T={T:g}: {t_c:.4f} s, {tr_c.steps} steps")
    print(f"speedup {t_py / t_c:.1f}x, max state difference {diff:.2e}")


if __name__ == "__main__":
    main()
