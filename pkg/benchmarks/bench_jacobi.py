#!/usr/bin/env python3
"""Jacobi eigensolver: numba kernel vs the pure-numpy fallback.

Also times whole solves per backend. The p_G/q_G barrier barely touches the
kernel (Cholesky does the work), the PPT solver calls it for matrix square
roots every Newton step.

    python benchmarks/bench_jacobi.py [--sizes 4 9 16 36] [--repeat 20]
"""

import argparse
import time

import numpy as np

from ptbound import _kernels, example_ensemble, solve_pg, solve_ppt
from ptbound.linalg import JACOBI_MAX_SWEEPS, JACOBI_REL_TOL


def random_hermitian(rng, n):
    x = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return 0.5 * (x + x.conj().T)


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=[4, 9, 16, 36, 64])
    ap.add_argument("--repeat", type=int, default=10)
    args = ap.parse_args()

    if not _kernels.HAS_NUMBA:
        print("numba not importable; only the numpy path can be timed")
        return

    rng = np.random.default_rng(0)
    # first call compiles (or loads the on-disk cache)
    t0 = time.perf_counter()
    _kernels.jacobi_numba(random_hermitian(rng, 4), JACOBI_REL_TOL, JACOBI_MAX_SWEEPS)
    print(f"numba warmup/compile: {time.perf_counter() - t0:.2f} s\n")

    print(f"{'D':>5} {'numba ms':>10} {'numpy ms':>10} {'speedup':>8} {'max |dw|':>10}")
    for n in args.sizes:
        a = random_hermitian(rng, n)
        w_nb = _kernels.jacobi_numba(a, JACOBI_REL_TOL, JACOBI_MAX_SWEEPS)[0]
        w_np = _kernels.jacobi_numpy(a, JACOBI_REL_TOL, JACOBI_MAX_SWEEPS)[0]
        t_nb = best_of(lambda: _kernels.jacobi_numba(a, JACOBI_REL_TOL, JACOBI_MAX_SWEEPS), args.repeat)
        # the numpy loop is slow at large D, cap its repeats
        t_np = best_of(lambda: _kernels.jacobi_numpy(a, JACOBI_REL_TOL, JACOBI_MAX_SWEEPS), max(1, args.repeat // 5))
        dw = np.abs(w_nb - w_np).max()
        print(f"{n:>5} {1e3 * t_nb:>10.3f} {1e3 * t_np:>10.3f} {t_np / t_nb:>8.1f} {dw:>10.2e}")

    before = _kernels.get_backend()
    print()
    for label, solve, d in (("solve_pg", solve_pg, 3), ("solve_ppt", solve_ppt, 2), ("solve_ppt", solve_ppt, 3)):
        e = example_ensemble(d, 0.5)
        for name in ("numba", "numpy"):
            _kernels.set_backend(name)
            t = best_of(lambda: solve(e), 1)
            print(f"{label} d={d} with {name:5s}: {t:.2f} s")
    _kernels.set_backend(before)


if __name__ == "__main__":
    main()
