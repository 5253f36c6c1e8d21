"""Exact bottleneck and p-Wasserstein distances between diagrams.

Matching a point x of one diagram with a point y of the other costs the
quotient distance min(d(x, y), d(x, A) + d(y, A)); matching a point with A
costs its distance to A; unmatched mass on both sides is absorbed by A for
free.  The bottleneck distance minimizes the largest cost, the p-Wasserstein
distance the p-norm of the cost multiset.

The bottleneck value is found by binary search over the finite set of
candidate costs, deciding each threshold exactly with a bipartite matching
kernel, so the result is one of the candidate floats with no tolerance.
Wasserstein values come from an exact min-cost assignment; reported values
are recomputed from the returned pairs with compensated summation of the
sorted cost powers, which makes them insensitive to the order the solver
discovered the pairs in.

``brute_force_dp`` enumerates every augmented bijection directly from the
definition (ambient distances, explicit A-assignments) and is the oracle
the solvers are validated against.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from itertools import permutations
from typing import Iterable

import numpy as np

from ._kernels import augmented_matching, solve_assignment
from .diagram import Diagram, _check_same_space
from .errors import ParseError, SpaceMismatch, TooLarge
from .spaces import BASEPOINT, BasepointTag, MetricPair, Point

__all__ = [
    "DEFAULT_NODE_CAP",
    "MatchedPair",
    "Matching",
    "candidate_thresholds",
    "feasible_at_threshold",
    "bottleneck",
    "wasserstein",
    "brute_force_dp",
    "matching_to_json",
    "matching_from_json",
]

DEFAULT_NODE_CAP = 10_000
BRUTE_FORCE_CAP = 10


@dataclass(frozen=True)
class MatchedPair:
    left: Point | BasepointTag
    right: Point | BasepointTag
    cost: float


@dataclass(frozen=True)
class Matching:
    """A bijection witness between two diagrams' augmented point sets.

    ``value`` is the matching's objective: the max cost for p = inf, else
    the p-norm of the costs.  ``bottleneck_cost`` is always the max cost,
    ``sum_cost_p`` the sum of p-th cost powers (None for p = inf).
    """

    pairs: tuple[MatchedPair, ...]
    value: float
    p: float
    bottleneck_cost: float
    sum_cost_p: float | None = None


def p_norm(costs: Iterable[float], p: float) -> tuple[float, float | None]:
    """(value, sum of p-th powers) of a cost multiset, order-independent."""
    costs = list(costs)
    if math.isinf(p):
        return (max(costs) if costs else 0.0, None)
    if not costs:
        return 0.0, 0.0
    if p == 1.0:
        s = math.fsum(sorted(costs))
        return s, s
    s = math.fsum(sorted(c**p for c in costs))
    return s ** (1.0 / p), s


def _expand(diagram: Diagram, pair: MetricPair) -> tuple[list[Point], np.ndarray]:
    _check_same_space(diagram, pair)
    pts = list(diagram.iter_points())
    return pts, pair.coords_matrix(pts)


def _cost_data(sigma: Diagram, tau: Diagram, pair: MetricPair, max_nodes: int):
    xs, X = _expand(sigma, pair)
    ys, Y = _expand(tau, pair)
    n, m = len(xs), len(ys)
    if n + m > max_nodes:
        raise TooLarge(f"{n} + {m} expanded points exceed the cap of {max_nodes}")
    D = pair.pairwise_dist(X, Y)
    ax = pair.dist_to_A_batch(X)
    ay = pair.dist_to_A_batch(Y)
    Q = np.minimum(D, ax[:, None] + ay[None, :])
    return xs, ys, np.ascontiguousarray(D), np.ascontiguousarray(Q), ax, ay


def _build_pairs(xs, ys, assign_l, n, m, D, Q, ax, ay) -> tuple[MatchedPair, ...]:
    """Convert a left-to-right node assignment into matched pairs.

    A point pair whose quotient cost comes from the route through A is
    split into the two explicit A-assignments it abbreviates, so stored
    costs always refer to actual distances in the pair.  Ties split too:
    over a quotient pair the ambient distance already equals the rounded
    route through A, and splitting keeps the reported cost multiset
    identical to the one the same matching has over the unquotiented pair.
    """
    out = []
    for u, v in enumerate(assign_l):
        if u < n:
            if v < m:
                if ax[u] + ay[v] <= D[u, v]:
                    out.append(MatchedPair(xs[u], BASEPOINT, float(ax[u])))
                    out.append(MatchedPair(BASEPOINT, ys[v], float(ay[v])))
                else:
                    out.append(MatchedPair(xs[u], ys[v], float(Q[u, v])))
            else:
                out.append(MatchedPair(xs[u], BASEPOINT, float(ax[u])))
        elif v < m:
            out.append(MatchedPair(BASEPOINT, ys[v], float(ay[v])))
        # slot-to-slot assignments carry no mass
    return tuple(out)


def candidate_thresholds(sigma: Diagram, tau: Diagram, pair: MetricPair,
                         max_nodes: int = DEFAULT_NODE_CAP) -> list[float]:
    """Sorted distinct values the bottleneck distance can take: 0, the
    pairwise quotient costs, and each point's distance to A."""
    _, _, _, Q, ax, ay = _cost_data(sigma, tau, pair, max_nodes)
    vals = np.concatenate((np.array([0.0]), Q.ravel(), ax, ay))
    return [float(v) for v in np.unique(vals)]


def feasible_at_threshold(
    sigma: Diagram,
    tau: Diagram,
    pair: MetricPair,
    r: float,
    max_nodes: int = DEFAULT_NODE_CAP,
) -> tuple[bool, Matching | None]:
    """Decide whether some augmented bijection keeps every cost <= r; on
    success also return one such matching as a witness."""
    if r < 0.0:
        return False, None
    xs, ys, D, Q, ax, ay = _cost_data(sigma, tau, pair, max_nodes)
    n, m = len(xs), len(ys)
    ml = augmented_matching(Q, ax, ay, float(r))
    if np.any(ml < 0):
        return False, None
    pairs = _build_pairs(xs, ys, ml, n, m, D, Q, ax, ay)
    worst = max((q.cost for q in pairs), default=0.0)
    return True, Matching(pairs, worst, math.inf, worst, None)


def bottleneck(
    sigma: Diagram,
    tau: Diagram,
    pair: MetricPair,
    max_nodes: int = DEFAULT_NODE_CAP,
) -> tuple[float, Matching]:
    """Exact bottleneck distance and an optimal matching.

    Binary search over the sorted candidate costs; the returned value is
    exactly the largest cost of the returned matching.
    """
    xs, ys, D, Q, ax, ay = _cost_data(sigma, tau, pair, max_nodes)
    n, m = len(xs), len(ys)
    cands = np.unique(np.concatenate((np.array([0.0]), Q.ravel(), ax, ay)))
    lo, hi = 0, len(cands) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        ml = augmented_matching(Q, ax, ay, float(cands[mid]))
        if np.any(ml < 0):
            lo = mid + 1
        else:
            hi = mid
    r = float(cands[lo])
    ml = augmented_matching(Q, ax, ay, r)
    pairs = _build_pairs(xs, ys, ml, n, m, D, Q, ax, ay)
    value = max((q.cost for q in pairs), default=0.0)
    return value, Matching(pairs, value, math.inf, value, None)


def wasserstein(
    sigma: Diagram,
    tau: Diagram,
    p: float,
    pair: MetricPair,
    max_nodes: int = DEFAULT_NODE_CAP,
) -> tuple[float, Matching]:
    """Exact p-Wasserstein distance (1 <= p < inf) and an optimal matching."""
    p = float(p)
    if math.isinf(p):
        return bottleneck(sigma, tau, pair, max_nodes)
    if not p >= 1.0:
        raise ValueError(f"p must be >= 1, got {p}")
    xs, ys, D, Q, ax, ay = _cost_data(sigma, tau, pair, max_nodes)
    n, m = len(xs), len(ys)
    N = n + m
    if N == 0:
        return 0.0, Matching((), 0.0, p, 0.0, 0.0)
    C = np.zeros((N, N), dtype=np.float64)
    C[:n, :m] = Q**p
    C[:n, m:] = np.broadcast_to((ax**p)[:, None], (n, n))
    C[n:, :m] = np.broadcast_to((ay**p)[None, :], (m, m))
    row_of_col = solve_assignment(np.ascontiguousarray(C))
    assign_l = np.empty(N, dtype=np.int64)
    assign_l[row_of_col] = np.arange(N)
    pairs = _build_pairs(xs, ys, assign_l, n, m, D, Q, ax, ay)
    value, sum_p = p_norm((q.cost for q in pairs), p)
    worst = max((q.cost for q in pairs), default=0.0)
    return value, Matching(pairs, value, p, worst, sum_p)


def brute_force_dp(
    sigma: Diagram,
    tau: Diagram,
    p: float,
    pair: MetricPair,
    cap: int = BRUTE_FORCE_CAP,
) -> tuple[float, Matching]:
    """Reference solver straight from the definition: enumerate every
    augmented bijection using ambient distances and explicit A-assignments.
    Exponential; refuses more than ``cap`` expanded points total."""
    xs, X = _expand(sigma, pair)
    ys, Y = _expand(tau, pair)
    n, m = len(xs), len(ys)
    if n + m > cap:
        raise TooLarge(f"brute force capped at {cap} expanded points, got {n + m}")
    D = pair.pairwise_dist(X, Y)
    ax = pair.dist_to_A_batch(X)
    ay = pair.dist_to_A_batch(Y)
    p = float(p)
    if not (p >= 1.0 or math.isinf(p)):
        raise ValueError(f"p must be >= 1 or inf, got {p}")

    inf_p = math.isinf(p)
    best_key = math.inf
    best_assign: tuple[int, ...] | None = None
    # each sigma point maps to a tau point or to A (-1); each choice of
    # k matched sigma points pairs them with an ordered k-subset of tau
    for k in range(0, min(n, m) + 1):
        for left_subset in _index_subsets(n, k):
            rest = [i for i in range(n) if i not in left_subset]
            for right_perm in permutations(range(m), k):
                costs = [float(D[i, j]) for i, j in zip(left_subset, right_perm)]
                costs.extend(float(ax[i]) for i in rest)
                used = set(right_perm)
                costs.extend(float(ay[j]) for j in range(m) if j not in used)
                if inf_p:
                    key = max(costs, default=0.0)
                elif p == 1.0:
                    key = math.fsum(sorted(costs))
                else:
                    key = math.fsum(sorted(c**p for c in costs))
                if key < best_key:
                    best_key = key
                    assign = [-1] * n
                    for i, j in zip(left_subset, right_perm):
                        assign[i] = j
                    best_assign = tuple(assign)
    assert best_assign is not None
    pairs = []
    for i, j in enumerate(best_assign):
        if j >= 0:
            pairs.append(MatchedPair(xs[i], ys[j], float(D[i, j])))
        else:
            pairs.append(MatchedPair(xs[i], BASEPOINT, float(ax[i])))
    matched = {j for j in best_assign if j >= 0}
    for j in range(m):
        if j not in matched:
            pairs.append(MatchedPair(BASEPOINT, ys[j], float(ay[j])))
    value, sum_p = p_norm((q.cost for q in pairs), p)
    worst = max((q.cost for q in pairs), default=0.0)
    return value, Matching(tuple(pairs), value, p, worst, sum_p)


def _index_subsets(n: int, k: int):
    from itertools import combinations

    return combinations(range(n), k)


# -- serialization -----------------------------------------------------


def _end_to_json(e: Point | BasepointTag):
    if isinstance(e, BasepointTag):
        return "A"
    return [float(c) for c in e.coords]


def matching_to_json(matching: Matching) -> dict:
    return {
        "pairs": [
            {"left": _end_to_json(q.left), "right": _end_to_json(q.right), "cost": q.cost}
            for q in matching.pairs
        ],
        "value": matching.value,
        "p": "inf" if math.isinf(matching.p) else matching.p,
    }


def matching_from_json(obj: dict | str, pair: MetricPair) -> Matching:
    if isinstance(obj, (str, bytes)):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as e:
            raise ParseError(f"invalid matching JSON: {e}") from e
    if not isinstance(obj, dict) or "pairs" not in obj:
        raise ParseError('matching JSON must be an object with "pairs"')
    p_raw = obj.get("p", "inf")
    p = math.inf if p_raw == "inf" else float(p_raw)

    def end(v):
        if v == "A":
            return BASEPOINT
        return pair.point(*[float(c) for c in v])

    pairs = tuple(
        MatchedPair(end(e["left"]), end(e["right"]), float(e["cost"])) for e in obj["pairs"]
    )
    value, sum_p = p_norm((q.cost for q in pairs), p)
    worst = max((q.cost for q in pairs), default=0.0)
    declared = obj.get("value")
    if declared is not None and not math.isclose(float(declared), value, rel_tol=1e-9, abs_tol=1e-12):
        raise ParseError(f"declared value {declared} disagrees with pairs ({value})")
    return Matching(pairs, value, p, worst, sum_p)
