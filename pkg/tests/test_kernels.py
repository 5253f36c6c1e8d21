"""Kernel-level checks: feasibility vs direct enumeration, assignment vs
scipy, and parity between the compiled and pure-Python paths."""

import math
import os
import subprocess
import sys
from itertools import combinations, permutations

import numpy as np
import pytest

from pdmetric._kernels import (
    NUMBA_ENABLED,
    augmented_matching,
    plain_augmented_matching,
    plain_solve_assignment,
    solve_assignment,
)

scipy_opt = pytest.importorskip("scipy.optimize")


def random_instance(rng, n, m):
    # small integer grids create plenty of cost ties
    Q = rng.integers(0, 6, (n, m)).astype(np.float64)
    ax = rng.integers(0, 6, n).astype(np.float64)
    ay = rng.integers(0, 6, m).astype(np.float64)
    Q = np.minimum(Q, ax[:, None] + ay[None, :])
    return Q, ax, ay


def brute_bottleneck(Q, ax, ay):
    """Smallest achievable max cost over all augmented bijections."""
    n, m = Q.shape
    best = math.inf
    for k in range(min(n, m) + 1):
        for left in combinations(range(n), k):
            rest = [i for i in range(n) if i not in left]
            for perm in permutations(range(m), k):
                costs = [Q[i, j] for i, j in zip(left, perm)]
                costs.extend(ax[i] for i in rest)
                used = set(perm)
                costs.extend(ay[j] for j in range(m) if j not in used)
                best = min(best, max(costs, default=0.0))
    return best


def check_matching_valid(ml, Q, ax, ay, r):
    """Every left node matched, rights distinct, every edge admissible."""
    n, m = Q.shape
    assert not np.any(ml < 0)
    assert len(set(ml.tolist())) == len(ml)
    for u, v in enumerate(ml):
        if u < n:
            if v < m:
                assert Q[u, v] <= r
            else:
                assert v == m + u and ax[u] <= r
        else:
            if v < m:
                assert v == u - n and ay[v] <= r
            else:
                assert v >= m  # slot-to-slot, always admissible


def test_feasibility_matches_enumeration():
    rng = np.random.default_rng(7)
    for _ in range(120):
        n = int(rng.integers(0, 5))
        m = int(rng.integers(0, 5))
        Q, ax, ay = random_instance(rng, n, m)
        rstar = brute_bottleneck(Q, ax, ay)
        cands = sorted(set([0.0, rstar]) | set(Q.ravel()) | set(ax) | set(ay))
        for r in cands:
            ml = augmented_matching(Q, ax, ay, float(r))
            feasible = not np.any(ml < 0)
            assert feasible == (r >= rstar), (Q, ax, ay, r, rstar)
            if feasible:
                check_matching_valid(ml, Q, ax, ay, r)


def test_assignment_matches_scipy():
    rng = np.random.default_rng(11)
    for _ in range(80):
        nn = int(rng.integers(1, 9))
        cost = rng.uniform(0.0, 10.0, (nn, nn))
        if rng.integers(0, 2):
            cost = np.round(cost)  # force ties
        row_of_col = solve_assignment(cost)
        assert sorted(row_of_col.tolist()) == list(range(nn))
        ours = float(cost[row_of_col, np.arange(nn)].sum())
        ri, ci = scipy_opt.linear_sum_assignment(cost)
        ref = float(cost[ri, ci].sum())
        assert math.isclose(ours, ref, rel_tol=1e-12, abs_tol=1e-12)


def test_plain_path_matches_dispatched_path():
    rng = np.random.default_rng(23)
    for _ in range(40):
        n = int(rng.integers(0, 5))
        m = int(rng.integers(0, 5))
        Q, ax, ay = random_instance(rng, n, m)
        for r in (0.0, 2.0, 5.0, 100.0):
            a = augmented_matching(Q, ax, ay, r)
            b = plain_augmented_matching(Q, ax, ay, r)
            assert np.array_equal(a, b)
        nn = n + m
        if nn:
            cost = rng.uniform(0.0, 10.0, (nn, nn))
            assert np.array_equal(solve_assignment(cost), plain_solve_assignment(cost))


def test_numba_flag_matches_environment():
    if os.environ.get("PDMETRIC_NO_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}:
        assert not NUMBA_ENABLED
    else:
        assert NUMBA_ENABLED == (pytest.importorskip("numba") is not None)


def test_fallback_subprocess_gives_identical_distances():
    """Results must not depend on whether the kernels were compiled."""
    script = (
        "import json, math\n"
        "import pdmetric._kernels as k\n"
        "from pdmetric import PlaneDiagonal, canonicalize, bottleneck, wasserstein\n"
        "pair = PlaneDiagonal()\n"
        "s = canonicalize([pair.point(0.0, 10.0), pair.point(2.0, 4.0), pair.point(5.0, 5.5)], pair)\n"
        "t = canonicalize([pair.point(1.0, 11.0), pair.point(2.5, 3.5)], pair)\n"
        "b, _ = bottleneck(s, t, pair)\n"
        "w1, _ = wasserstein(s, t, 1.0, pair)\n"
        "w2, _ = wasserstein(s, t, 2.0, pair)\n"
        "print(json.dumps({'numba': k.NUMBA_ENABLED, 'b': b.hex(), 'w1': w1.hex(), 'w2': w2.hex()}))\n"
    )

    def run(env_extra):
        env = dict(os.environ, **env_extra)
        out = subprocess.run(
            [sys.executable, "-c", script], capture_output=True, text=True, env=env
        )
        assert out.returncode == 0, out.stderr
        import json

        return json.loads(out.stdout)

    plain = run({"PDMETRIC_NO_NUMBA": "1"})
    assert plain["numba"] is False
    # compare against the in-process path (jitted when numba is available)
    from pdmetric import PlaneDiagonal, bottleneck, canonicalize, wasserstein

    pair = PlaneDiagonal()
    s = canonicalize([pair.point(0.0, 10.0), pair.point(2.0, 4.0), pair.point(5.0, 5.5)], pair)
    t = canonicalize([pair.point(1.0, 11.0), pair.point(2.5, 3.5)], pair)
    assert bottleneck(s, t, pair)[0].hex() == plain["b"]
    assert wasserstein(s, t, 1.0, pair)[0].hex() == plain["w1"]
    assert wasserstein(s, t, 2.0, pair)[0].hex() == plain["w2"]
