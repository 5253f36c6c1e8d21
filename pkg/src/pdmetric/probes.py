"""Desk-scale probes of the metric geometry of diagram spaces.

Each probe runs an exact, finite computation whose outcome illustrates (or
refutes, at the sampled scale) a structural property of the diagram
metric: discreteness obstructions to completeness-free limits, Cauchy
limits recovered by trajectory tracking, total boundedness of annuli
around A, countable dense families, and the adversarial diagram that
defeats any claimed countable dense set when X is too spread out.

Probes never extrapolate: a WITNESSED or REFUTED verdict is only emitted
when the defining inequality was actually checked by the exact solver, and
everything else reports INCONCLUSIVE.
"""

from __future__ import annotations

import math
from collections import defaultdict, deque
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .diagram import Diagram, canonicalize
from .errors import (
    CoverageGap,
    EmptyAnnulus,
    NotCauchy,
    PreconditionViolated,
    SpaceMismatch,
)
from .matching import bottleneck
from .spaces import BasepointTag, FiniteExplicit, MetricPair, Point

__all__ = [
    "Verdict",
    "ProbeReport",
    "EpsNet",
    "DenseFamily",
    "isolated_point_bound",
    "vanishing_pair_demo",
    "cauchy_chain_limit",
    "greedy_eps_net",
    "net_growth_probe",
    "dense_family",
    "approximate_from_family",
    "separability_adversary",
]


class Verdict(str, Enum):
    WITNESSED = "WITNESSED"
    REFUTED = "REFUTED"
    INCONCLUSIVE = "INCONCLUSIVE"


@dataclass(frozen=True)
class ProbeReport:
    probe_name: str
    verdict: Verdict
    witnesses: dict
    numeric_trace: tuple[tuple[float, float], ...]

    def to_json(self) -> dict:
        return {
            "probe": self.probe_name,
            "verdict": self.verdict.value,
            "trace": [[float(a), float(b)] for a, b in self.numeric_trace],
            "witnesses": _jsonify(self.witnesses),
        }


def _jsonify(v):
    if isinstance(v, BasepointTag):
        return "A"
    if isinstance(v, Point):
        return [float(c) for c in v.coords]
    if isinstance(v, Diagram):
        return [
            {"coords": [float(c) for c in p.coords], "mult": m} for p, m in v.points
        ]
    if isinstance(v, EpsNet):
        return {
            "epsilon": v.epsilon,
            "region": list(v.region),
            "centers": [_jsonify(c) for c in v.centers],
        }
    if isinstance(v, Enum):
        return v.value
    if isinstance(v, dict):
        return {str(k): _jsonify(u) for k, u in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonify(u) for u in v]
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, float) and math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


# -- discreteness bounds -------------------------------------------------


def isolated_point_bound(pair: FiniteExplicit, sigma: Diagram, tau: Diagram):
    """Lower bound for the bottleneck distance between distinct diagrams
    over a finite explicit pair.

    Every point whose multiplicity differs must move, and moving x costs
    at least min(distance to the nearest other point off A, distance to
    A).  The solver distance is checked against that bound exactly.
    """
    if not isinstance(pair, FiniteExplicit):
        raise PreconditionViolated("isolated_point_bound needs a FiniteExplicit pair")
    if sigma == tau:
        raise PreconditionViolated("diagrams must be distinct")

    def mults(d: Diagram) -> dict[int, int]:
        return {int(p.coords[0]): m for p, m in d.points}

    ms, mt = mults(sigma), mults(tau)
    differing = sorted(set(ms) ^ set(mt) | {i for i in set(ms) & set(mt) if ms[i] != mt[i]})
    a_set = set(pair.A_indices)
    off_A = [i for i in range(pair.size) if i not in a_set]
    eps = math.inf
    per_point = []
    for i in differing:
        iso = min(
            (float(pair.matrix[i, j]) for j in off_A if j != i), default=math.inf
        )
        eps_i = min(iso, float(pair._a_dist[i]))
        per_point.append((i, eps_i))
        eps = min(eps, eps_i)
    dist, _ = bottleneck(sigma, tau, pair)
    ok = dist >= eps
    report = ProbeReport(
        probe_name="isolated_point_bound",
        verdict=Verdict.WITNESSED if ok else Verdict.REFUTED,
        witnesses={
            "epsilon": eps,
            "distance": dist,
            "differing_points": [i for i, _ in per_point],
        },
        numeric_trace=tuple((float(i), e) for i, e in per_point),
    )
    return eps, dist, report


def vanishing_pair_demo(
    pair: MetricPair,
    limit_point: Point,
    tail: Sequence[Point],
    n_max: int = 50,
    target: float = 0.05,
):
    """Distinct diagrams at arbitrarily small distance: sigma_N carries the
    limit point x plus the first N tail points, tau_N swaps x for the next
    tail point.  A single-swap bijection bounds d(sigma_N, tau_N) by
    d(x, x_{N+1}), which vanishes along a tail converging to x."""
    tail = list(tail)
    if n_max < 1:
        raise PreconditionViolated("n_max must be at least 1")
    if len(tail) < n_max + 1:
        raise PreconditionViolated(
            f"tail exhausted: need {n_max + 1} points, got {len(tail)}"
        )
    pair.check_point(limit_point)
    for q in tail[: n_max + 1]:
        if pair.dist(limit_point, q) == 0.0:
            raise PreconditionViolated("tail points must differ from the limit point")
    trace = []
    bounds = []
    all_bounded = True
    for N in range(1, n_max + 1):
        sigma = canonicalize([limit_point] + tail[:N], pair)
        tau = canonicalize(tail[: N + 1], pair)
        d, _ = bottleneck(sigma, tau, pair)
        bound = pair.dist(limit_point, tail[N])
        trace.append((float(N), d))
        bounds.append((float(N), bound))
        if d > bound or not d > 0.0:
            all_bounded = False
    final = trace[-1][1]
    ok = all_bounded and final < target
    report = ProbeReport(
        probe_name="vanishing_pair",
        verdict=Verdict.WITNESSED if ok else Verdict.REFUTED,
        witnesses={
            "limit_point": limit_point,
            "target": target,
            "final_distance": final,
            "single_swap_bounds": bounds,
        },
        numeric_trace=tuple(trace),
    )
    return report


# -- Cauchy limits -------------------------------------------------------


def cauchy_chain_limit(
    diagrams: Sequence[Diagram],
    pair: MetricPair,
    conv_tol: float = 1e-6,
    envelope_floor: float = 1e-9,
):
    """Extract the limit of a Cauchy sequence of diagrams by tracking
    point trajectories through composed optimal matchings.

    A geometric envelope is extracted first: stage k is the earliest index
    N_k with d(sigma_{N_k}, sigma_n) <= 2^(1-k) for every later sampled n.
    Optimal matchings between consecutive stages compose into trajectories;
    a trajectory whose last positions settle (within conv_tol) contributes
    its final point to the limit, one whose distance to A falls below the
    tolerance is absorbed, and anything unresolved downgrades the verdict
    to INCONCLUSIVE.  Raises NotCauchy when fewer than three envelope
    stages exist in the sampled sequence.
    """
    diags = list(diagrams)
    if not diags:
        raise PreconditionViolated("need at least one diagram")
    for d in diags:
        if d.space_id != pair.space_id:
            raise SpaceMismatch(
                f"diagram over {d.space_id!r} used with space {pair.space_id!r}"
            )
    L = len(diags)
    cache: dict[tuple[int, int], float] = {}

    def dist(i: int, j: int) -> float:
        if i == j:
            return 0.0
        if i > j:
            i, j = j, i
        if (i, j) not in cache:
            cache[(i, j)], _ = bottleneck(diags[i], diags[j], pair)
        return cache[(i, j)]

    stages: list[tuple[int, int, float]] = []  # (k, index, bound)
    start = 0
    k = 0
    while True:
        bound = 2.0 ** (1 - k)
        found = -1
        for N in range(start, L - 1):
            if all(dist(N, n) <= bound for n in range(N + 1, L)):
                found = N
                break
        if found < 0:
            break
        stages.append((k, found, bound))
        start = found
        k += 1
        if bound <= envelope_floor:
            break
    if len(stages) < 3:
        raise NotCauchy(
            f"only {len(stages)} geometric envelope stages in {L} sampled diagrams"
        )

    # trajectories through composed optimal matchings between stages
    stage_diags = [diags[idx] for _, idx, _ in stages]
    trajs: list[list[Point]] = [[pt] for pt in stage_diags[0].iter_points()]
    ended: list[list[Point]] = []
    live = list(range(len(trajs)))
    for s in range(len(stage_diags) - 1):
        _, mt = bottleneck(stage_diags[s], stage_diags[s + 1], pair)
        takes: dict[tuple[float, ...], deque] = defaultdict(deque)
        births: list[Point] = []
        for mp in mt.pairs:
            if isinstance(mp.left, BasepointTag):
                if not isinstance(mp.right, BasepointTag):
                    births.append(mp.right)
            else:
                takes[mp.left.coords].append(mp.right)
        new_live = []
        for ti in live:
            nxt = takes[trajs[ti][-1].coords].popleft()
            if isinstance(nxt, BasepointTag):
                ended.append(trajs[ti])
            else:
                trajs[ti].append(nxt)
                new_live.append(ti)
        for b in births:
            trajs.append([b])
            new_live.append(len(trajs) - 1)
        live = new_live

    final_bound = stages[-1][2]
    absorb_tol = final_bound + conv_tol
    limit_pts: list[Point] = []
    unresolved = 0
    for ti in live:
        positions = trajs[ti]
        last = positions[-1]
        if pair.dist_to_A(last) <= absorb_tol:
            continue  # vanishing trajectory, absorbed by A
        window = positions[-3:]
        if len(window) == 3 and all(
            pair.dist(a, b) <= conv_tol for a in window for b in window
        ):
            limit_pts.append(last)
        else:
            unresolved += 1
    limit = canonicalize(limit_pts, pair)

    trace = []
    verified = True
    for k_idx, (k, idx, bound) in enumerate(stages):
        d_lim, _ = bottleneck(diags[idx], limit, pair)
        trace.append((float(k), d_lim))
        if d_lim > 2.0 * bound + conv_tol:
            verified = False
    verdict = Verdict.WITNESSED if verified and unresolved == 0 else Verdict.INCONCLUSIVE
    report = ProbeReport(
        probe_name="cauchy_chain_limit",
        verdict=verdict,
        witnesses={
            "stages": [[k, idx, b] for k, idx, b in stages],
            "limit": limit,
            "unresolved_trajectories": unresolved,
            "final_envelope": final_bound,
        },
        numeric_trace=tuple(trace),
    )
    return limit, report


# -- total boundedness ---------------------------------------------------


@dataclass(frozen=True)
class EpsNet:
    """Centers pairwise >= epsilon apart covering the sampled annulus
    region delta <= d(x, A) < D within epsilon."""

    epsilon: float
    centers: tuple[Point, ...]
    region: tuple[float, float]


def greedy_eps_net(
    pair: MetricPair,
    delta: float,
    D: float,
    epsilon: float,
    samples: Iterable[Point],
) -> EpsNet:
    """Greedy farthest-point insertion over the sampled annulus, seeded at
    the first in-region sample.  Stops when every sample is within epsilon
    of a center, so the result is an epsilon-net of the samples whose
    centers are pairwise at least epsilon apart."""
    delta, D, epsilon = float(delta), float(D), float(epsilon)
    if not 0.0 < delta < D:
        raise PreconditionViolated(f"need 0 < delta < D, got delta={delta}, D={D}")
    if epsilon <= 0.0:
        raise PreconditionViolated("epsilon must be positive")
    pts = []
    for p in samples:
        pair.check_point(p)
        a = pair.dist_to_A(p)
        if delta <= a < D:
            pts.append(p)
    if not pts:
        raise EmptyAnnulus(f"no sample lies in the annulus [{delta}, {D})")
    coords = pair.coords_matrix(pts)
    min_to_center = np.full(len(pts), np.inf)
    center_idx = [0]
    current = 0
    while True:
        col = pair.pairwise_dist(coords, coords[current : current + 1])[:, 0]
        min_to_center = np.minimum(min_to_center, col)
        far = int(np.argmax(min_to_center))
        if float(min_to_center[far]) < epsilon:
            break
        center_idx.append(far)
        current = far
    centers = tuple(pts[i] for i in center_idx)
    return EpsNet(epsilon, centers, (delta, D))


def net_growth_probe(
    pair: MetricPair,
    delta: float,
    D: float,
    epsilon: float,
    sample_batches: Sequence[Sequence[Point]],
):
    """Watch the greedy net size across growing sample sets.  Strictly
    growing sizes refute total boundedness at the sampled scale; anything
    else stays INCONCLUSIVE (bounded samples can never certify a bound
    over the whole annulus)."""
    if not sample_batches:
        raise PreconditionViolated("need at least one sample batch")
    sizes = []
    last_net = None
    trace = []
    for i, batch in enumerate(sample_batches):
        last_net = greedy_eps_net(pair, delta, D, epsilon, batch)
        sizes.append(len(last_net.centers))
        trace.append((float(i), float(sizes[-1])))
    growing = len(sizes) >= 2 and all(b > a for a, b in zip(sizes, sizes[1:]))
    report = ProbeReport(
        probe_name="eps_net_growth",
        verdict=Verdict.REFUTED if growing else Verdict.INCONCLUSIVE,
        witnesses={
            "sizes": sizes,
            "epsilon": float(epsilon),
            "region": [float(delta), float(D)],
            "final_centers": list(last_net.centers),
        },
        numeric_trace=tuple(trace),
    )
    return last_net, report


# -- dense families --------------------------------------------------------


@dataclass(frozen=True)
class DenseFamily:
    """Level-n building block of a countable dense family: finite center
    set covering the annulus 1/n <= d(x, A) < n within 1/n.  Snapping a
    diagram's points to nearest centers approximates it within 1/n."""

    pair: MetricPair
    n: int
    centers: tuple[Point, ...]

    @property
    def radius(self) -> float:
        return 1.0 / self.n


def dense_family(
    pair: MetricPair,
    n: int,
    net: EpsNet,
    validation_samples: Iterable[Point] = (),
) -> DenseFamily:
    n = int(n)
    if n < 1:
        raise PreconditionViolated("n must be at least 1")
    radius = 1.0 / n
    if net.epsilon > radius:
        raise PreconditionViolated(
            f"net resolution {net.epsilon} too coarse for level {n} (needs <= {radius})"
        )
    if net.region[0] > radius or net.region[1] < float(n):
        raise PreconditionViolated(
            f"net region {net.region} does not cover the level-{n} annulus"
        )
    for c in net.centers:
        pair.check_point(c)
    centers = tuple(sorted(net.centers, key=lambda p: p.coords))
    if not centers:
        raise PreconditionViolated("net has no centers")
    fam = DenseFamily(pair, n, centers)
    coords = pair.coords_matrix(list(centers))
    for s in validation_samples:
        pair.check_point(s)
        a = pair.dist_to_A(s)
        if not radius <= a < float(n):
            continue
        dists = pair.pairwise_dist(pair.coords_matrix([s]), coords)[0]
        if float(dists.min()) > radius:
            raise CoverageGap(
                f"validation sample {s!r} is {float(dists.min())} from the family"
            )
    return fam


def approximate_from_family(sigma: Diagram, family: DenseFamily):
    """Snap each point to its nearest family center (ties to the
    lexicographically first), dropping points within 1/n of A; returns the
    approximant and its exact distance to sigma, which stays <= 1/n."""
    pair = family.pair
    if sigma.space_id != pair.space_id:
        raise SpaceMismatch(
            f"diagram over {sigma.space_id!r} used with family over {pair.space_id!r}"
        )
    radius = family.radius
    coords = pair.coords_matrix(list(family.centers))
    snapped = []
    for p in sigma.iter_points():
        if pair.dist_to_A(p) < radius:
            continue
        dists = pair.pairwise_dist(pair.coords_matrix([p]), coords)[0]
        j = int(np.argmin(dists))
        if float(dists[j]) > radius:
            raise CoverageGap(
                f"{p!r} is {float(dists[j])} from the nearest center, beyond {radius}"
            )
        snapped.append(family.centers[j])
    tau = canonicalize(snapped, pair)
    d, _ = bottleneck(sigma, tau, pair)
    return tau, d


# -- separability adversary -----------------------------------------------


def separability_adversary(
    pair: MetricPair,
    candidates: Sequence[Diagram],
    delta: float,
    D: float,
    epsilon: float,
    separated_points: Sequence[Point],
):
    """Defeat a claimed countable dense family: given candidate diagrams
    sigma_0..sigma_{k-1} and points x_0..x_{k-1} in the annulus
    delta <= d(x, A) < D that are pairwise >= epsilon apart (epsilon <=
    delta), the diagram tau keeping exactly those x_i that are >= epsilon/2
    from every point of sigma_i satisfies d(tau, sigma_i) >= epsilon/2 for
    all i.  The inequalities are then checked with the exact solver."""
    delta, D, epsilon = float(delta), float(D), float(epsilon)
    if not 0.0 < delta < D:
        raise PreconditionViolated(f"need 0 < delta < D, got delta={delta}, D={D}")
    if not 0.0 < epsilon <= delta:
        raise PreconditionViolated("need 0 < epsilon <= delta")
    k = len(candidates)
    if k > len(separated_points):
        raise PreconditionViolated(
            f"{k} candidates but only {len(separated_points)} separated points"
        )
    xs = list(separated_points[:k])
    for x in xs:
        pair.check_point(x)
        a = pair.dist_to_A(x)
        if not delta <= a < D:
            raise PreconditionViolated(f"{x!r} lies outside the annulus [{delta}, {D})")
    for i in range(k):
        for j in range(i + 1, k):
            if pair.dist(xs[i], xs[j]) < epsilon:
                raise PreconditionViolated(
                    f"points {i} and {j} are {pair.dist(xs[i], xs[j])} apart, below {epsilon}"
                )
    half = epsilon / 2.0
    kept = []
    for i, sig in enumerate(candidates):
        if sig.space_id != pair.space_id:
            raise SpaceMismatch("candidate diagram over a different space")
        if all(pair.dist(p, xs[i]) >= half for p in sig.iter_points()):
            kept.append(xs[i])
    tau = canonicalize(kept, pair)
    trace = []
    ok = True
    for i, sig in enumerate(candidates):
        d, _ = bottleneck(tau, sig, pair)
        trace.append((float(i), d))
        if not d >= half:
            ok = False
    report = ProbeReport(
        probe_name="separability_adversary",
        verdict=Verdict.WITNESSED if ok else Verdict.REFUTED,
        witnesses={
            "tau": tau,
            "epsilon": epsilon,
            "half": half,
            "kept_points": kept,
            "candidates": len(candidates),
        },
        numeric_trace=tuple(trace),
    )
    return tau, report
