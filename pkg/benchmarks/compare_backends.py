"""Side-by-side timing of the numba and pure-numpy kernel backends.

Runs the same workloads through both implementations in one process and
prints per-call medians plus the numba speedup. The FDBF_BACKEND selection
is irrelevant here; both variants are invoked explicitly.

Usage: python3 benchmarks/compare_backends.py [--trials N] [--grid-points N]
"""

import argparse
import statistics
import sys
import time

import numpy as np

from fdbf import SystemConfig, draw_batch
from fdbf import kernels
from fdbf.numerics import RngState


def median_time_ns(fn, repeats):
    samples = []
    for _ in range(repeats):
        t0 = time.perf_counter_ns()
        fn()
        samples.append(time.perf_counter_ns() - t0)
    return statistics.median(samples)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=10000,
                    help="batch size for solve_batch (default 10000)")
    ap.add_argument("--grid-points", type=int, default=100000,
                    help="alpha grid resolution for grid_scan (default 100000)")
    ap.add_argument("--repeats", type=int, default=9,
                    help="timing repeats per cell (default 9)")
    args = ap.parse_args(argv)

    if not kernels.HAS_NUMBA:
        print("numba is not importable; nothing to compare", file=sys.stderr)
        return 1

    kernels.warmup()
    rows = []
    for n_t in (2, 4, 8, 16, 32, 64):
        cfg = SystemConfig(n_t=n_t, seed=0, trials=args.trials)
        h_d, a = draw_batch(cfg, args.trials)
        eps = 2.2908676527677702e-04
        kernels.solve_batch_numba(h_d, a, eps)  # compile for this signature
        t_np = median_time_ns(lambda: kernels.solve_batch_numpy(h_d, a, eps),
                              args.repeats)
        t_nb = median_time_ns(lambda: kernels.solve_batch_numba(h_d, a, eps),
                              args.repeats)
        rows.append((f"solve_batch n_t={n_t} n={args.trials}", t_np, t_nb))

    cfg = SystemConfig(n_t=8, seed=0)
    h_d, a = draw_batch(cfg, 1)
    gram = float(np.vdot(a[0], a[0]).real)
    p = a[0] * (np.vdot(a[0], h_d[0]) / gram)
    eps = 2.2908676527677702e-04
    for n_grid in (1000, args.grid_points):
        kernels.grid_scan_numba(h_d[0], p, a[0], eps, n_grid, 1e-12)
        t_np = median_time_ns(
            lambda: kernels.grid_scan_numpy(h_d[0], p, a[0], eps, n_grid, 1e-12),
            args.repeats)
        t_nb = median_time_ns(
            lambda: kernels.grid_scan_numba(h_d[0], p, a[0], eps, n_grid, 1e-12),
            args.repeats)
        rows.append((f"grid_scan n_t=8 grid={n_grid}", t_np, t_nb))

    width = max(len(r[0]) for r in rows)
    print(f"{'workload':<{width}}  {'numpy':>12}  {'numba':>12}  {'speedup':>8}")
    for name, t_np, t_nb in rows:
        print(f"{name:<{width}}  {t_np/1e6:>10.3f}ms  {t_nb/1e6:>10.3f}ms  "
              f"{t_np/t_nb:>7.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
