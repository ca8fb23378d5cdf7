"""Compiled vs pure-Python kernel timings.

    python benchmarks/bench_kernels.py [--repeat 5]

Each row times one workload on both backends and reports the speedup.
"""
import argparse
import math
import timeit

import numpy as np

from risangle import _kernels_py

try:
    from risangle import _kernels
except ImportError:
    _kernels = None

P0 = (15.83e-9, 38.26e-9, 2.2, 15.6e-12, 376.73)
F_OP = 5.195e9


def workloads(k):
    freqs = np.linspace(4e9, 7e9, 100_001)
    caps = np.full_like(freqs, 0.63e-12)
    gr, gi, _ = k.gamma_scalar(F_OP, 0.63e-12, *P0)
    start = math.atan2(gi, gr)
    targets = np.linspace(0.1, 5.0, 200)
    rng = np.random.default_rng(0)
    phases = rng.uniform(-math.pi, math.pi, 64)
    amps = np.ones(64)
    sin_obs = np.sin(np.radians(np.arange(-899, 900) * 0.1))

    def gamma_sweep():
        k.gamma_array(freqs, caps, *P0)

    def gamma_scalar_loop():
        for f in freqs[:5000]:
            k.gamma_scalar(f, 0.63e-12, *P0)

    def bisection():
        for t in targets:
            k.solve_capacitance(F_OP, *P0, 0.63e-12, 2.67e-12, start, -1.0, t, 1e-9, 200)

    def array_factor():
        k.array_factor_power(phases, amps, 0.871, 0.0, sin_obs)

    return {
        "gamma_array, 100k freqs": gamma_sweep,
        "gamma_scalar, 5k calls": gamma_scalar_loop,
        "solve_capacitance, 200 targets": bisection,
        "array_factor_power, 64 x 1799": array_factor,
    }


def best_time(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if _kernels is None:
        print("compiled extension not built; timing the Python backend only")
    py = workloads(_kernels_py)
    cy = workloads(_kernels) if _kernels is not None else {}
    print(f"{'workload':34s} {'python [ms]':>12s} {'cython [ms]':>12s} {'speedup':>8s}")
    for name, fn in py.items():
        t_py = best_time(fn, args.repeat) * 1e3
        if name in cy:
            t_cy = best_time(cy[name], args.repeat) * 1e3
            print(f"{name:34s} {t_py:12.3f} {t_cy:12.3f} {t_py / t_cy:7.1f}x")
        else:
            print(f"{name:34s} {t_py:12.3f} {'-':>12s} {'-':>8s}")


if __name__ == "__main__":
    main()
