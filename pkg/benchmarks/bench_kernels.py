"""Timing comparison between the compiled kernels and the pure-Python path.

Run with  python3 benchmarks/bench_kernels.py  [--sizes 10,30,60] [--repeat 5]

Both paths execute the same function bodies (see pdmetric._kernels); the
compiled path is selected automatically unless PDMETRIC_NO_NUMBA is set.
The benchmark calls both paths directly, so it works in a single process.
"""

import argparse
import time

import numpy as np

from pdmetric._kernels import (
    NUMBA_ENABLED,
    augmented_matching,
    plain_augmented_matching,
    plain_solve_assignment,
    solve_assignment,
)


def make_instance(rng, n, m):
    """Quotient-cost data shaped like a real diagram comparison."""
    births_x = rng.uniform(0.0, 100.0, n)
    gaps_x = rng.uniform(0.0, 10.0, n)
    births_y = rng.uniform(0.0, 100.0, m)
    gaps_y = rng.uniform(0.0, 10.0, m)
    xs = np.stack([births_x, births_x + gaps_x], axis=1)
    ys = np.stack([births_y, births_y + gaps_y], axis=1)
    D = np.abs(xs[:, None, :] - ys[None, :, :]).max(axis=-1)
    ax = gaps_x / 2.0
    ay = gaps_y / 2.0
    Q = np.minimum(D, ax[:, None] + ay[None, :])
    return np.ascontiguousarray(Q), ax, ay


def best_of(repeat, func, *args):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        func(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def assignment_cost(Q, ax, ay, p=2.0):
    n, m = Q.shape
    N = n + m
    C = np.zeros((N, N))
    C[:n, :m] = Q**p
    C[:n, m:] = np.broadcast_to((ax**p)[:, None], (n, n))
    C[n:, :m] = np.broadcast_to((ay**p)[None, :], (m, m))
    return np.ascontiguousarray(C)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", default="10,30,60", help="comma-separated point counts")
    ap.add_argument("--repeat", type=int, default=5, help="best-of repetitions")
    args = ap.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]
    rng = np.random.default_rng(0)

    print(f"compiled path available: {NUMBA_ENABLED}")
    # warm up compilation outside the timed region
    Qw, axw, ayw = make_instance(rng, 4, 4)
    augmented_matching(Qw, axw, ayw, 1.0)
    solve_assignment(assignment_cost(Qw, axw, ayw))

    header = f"{'n':>5} {'kernel':<22} {'compiled':>12} {'pure':>12} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for n in sizes:
        Q, ax, ay = make_instance(rng, n, n)
        r = float(np.median(Q))
        t_jit = best_of(args.repeat, augmented_matching, Q, ax, ay, r)
        t_py = best_of(args.repeat, plain_augmented_matching, Q, ax, ay, r)
        print(
            f"{n:>5} {'threshold matching':<22} {t_jit * 1e3:>10.3f}ms"
            f" {t_py * 1e3:>10.3f}ms {t_py / t_jit:>8.1f}x"
        )
        C = assignment_cost(Q, ax, ay)
        t_jit = best_of(args.repeat, solve_assignment, C)
        t_py = best_of(args.repeat, plain_solve_assignment, C)
        print(
            f"{n:>5} {'min-cost assignment':<22} {t_jit * 1e3:>10.3f}ms"
            f" {t_py * 1e3:>10.3f}ms {t_py / t_jit:>8.1f}x"
        )


if __name__ == "__main__":
    main()
