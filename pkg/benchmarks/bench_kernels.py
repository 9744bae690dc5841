"""Timing comparison of the compiled kernels against the numpy fallbacks.

Runs each kernel on both backends with identical inputs and reports the
best-of-three wall time plus the largest numerical deviation between the
two results.  Usage:

    python benchmarks/bench_kernels.py [--ticks 100000] [--points 200000]
"""

import argparse
import math
import time

import numpy as np

from mazecells import (
    Arena,
    FiringParams,
    GridCellParams,
    Pose,
    WalkParams,
    lattice_basis,
    phase_offset,
    rate_map,
    rates_at,
    walk_trajectory,
)
from mazecells._kernels import HAVE_NUMBA, get_kernels


def best_of(repeats, fn, *args):
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def max_abs_diff(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    mask = np.isfinite(a) & np.isfinite(b)
    if not np.array_equal(np.isfinite(a), np.isfinite(b)):
        return math.inf
    if not mask.any():
        return 0.0
    return float(np.abs(a[mask] - b[mask]).max())


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--ticks", type=int, default=100_000, help="walk length")
    ap.add_argument("--points", type=int, default=200_000, help="batch query count")
    ap.add_argument("--brute-points", type=int, default=20_000)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    if not HAVE_NUMBA:
        print("numba is unavailable; only the numpy backend can run.")
        return

    kj = get_kernels("numba")
    kn = get_kernels("numpy")
    rng = np.random.default_rng(0)

    cell = GridCellParams(1.0, math.pi / 4.0, 0.5, 0.0)
    b = lattice_basis(cell)
    off = phase_offset(cell)
    lattice_args = (b[0, 0], b[1, 0], b[0, 1], b[1, 1], off.x, off.y)

    rows = []

    # sequential random walk
    z_turn = rng.standard_normal(args.ticks - 1)
    z_retry = rng.standard_normal(args.ticks - 1)
    out_j = np.empty((args.ticks, 3))
    out_n = np.empty((args.ticks, 3))
    walk_args = (0.0, 0.0, 0.0, 0.02, 0.2, 1.3)
    kj.walk_loop(*walk_args, z_turn, z_retry, out_j)  # warm the JIT cache
    tj = best_of(args.repeats, kj.walk_loop, *walk_args, z_turn, z_retry, out_j)
    tn = best_of(args.repeats, kn.walk_loop, *walk_args, z_turn, z_retry, out_n)
    rows.append((f"walk_loop ({args.ticks} ticks)", tj, tn, max_abs_diff(out_j, out_n)))

    # batched firing rates
    px = rng.uniform(-1.3, 1.3, args.points)
    py = rng.uniform(-1.3, 1.3, args.points)
    r_j = np.empty(args.points)
    r_n = np.empty(args.points)
    rate_args = lattice_args + (cell.spacing, 5.0, 0.3)
    kj.rates_batch(px, py, *rate_args, r_j)
    tj = best_of(args.repeats, kj.rates_batch, px, py, *rate_args, r_j)
    tn = best_of(args.repeats, kn.rates_batch, px, py, *rate_args, r_n)
    rows.append((f"rates_batch ({args.points} pts)", tj, tn, max_abs_diff(r_j, r_n)))

    # exhaustive lattice search
    nb = args.brute_points
    bx = rng.uniform(-8.0, 8.0, nb)
    by = rng.uniform(-8.0, 8.0, nb)
    outs = [
        (np.empty(nb), np.empty(nb), np.empty(nb), np.empty(nb, np.int64), np.empty(nb, np.int64))
        for _ in range(2)
    ]
    kj.brute_force(bx, by, *lattice_args, 50, *outs[0])
    tj = best_of(args.repeats, kj.brute_force, bx, by, *lattice_args, 50, *outs[0])
    tn = best_of(args.repeats, kn.brute_force, bx, by, *lattice_args, 50, *outs[1])
    rows.append(
        (
            f"brute_force ({nb} pts, |m|,|n|<=50)",
            tj,
            tn,
            max(max_abs_diff(a, c) for a, c in zip(outs[0], outs[1])),
        )
    )

    # autocorrelogram of a realistic rate map
    pos = walk_trajectory(Arena(radius=1.3), WalkParams(), 50_000, Pose(0, 0, 0), seed=0)[:, :2]
    rm = rate_map(pos, rates_at(pos, cell, FiringParams(5.0, 0.3)), 0.05, (-1.3, 1.3, -1.3, 1.3))
    vals = np.ascontiguousarray(np.where(rm.visited, rm.values, 0.0))
    visited = np.ascontiguousarray(rm.visited)
    ny, nx = vals.shape
    ac_j = np.empty((2 * ny - 1, 2 * nx - 1))
    ac_n = np.empty((2 * ny - 1, 2 * nx - 1))
    kj.autocorr(vals, visited, 20, ac_j)
    tj = best_of(args.repeats, kj.autocorr, vals, visited, 20, ac_j)
    tn = best_of(args.repeats, kn.autocorr, vals, visited, 20, ac_n)
    rows.append((f"autocorr ({ny}x{nx} map)", tj, tn, max_abs_diff(ac_j, ac_n)))

    name_w = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{name_w}}  {'numba':>9}  {'numpy':>9}  {'speedup':>7}  max |diff|")
    for name, tj, tn, diff in rows:
        print(f"{name:<{name_w}}  {tj:>8.4f}s  {tn:>8.4f}s  {tn / tj:>6.1f}x  {diff:.2e}")


if __name__ == "__main__":
    main()
