"""Command-line front end: exact distances, geodesics, and probes.

Subcommands
-----------
- ``dist SIGMA TAU --space S [--p inf|P] [--matching OUT]``: exact
  bottleneck or p-Wasserstein distance, printed to 12 significant digits.
- ``geodesic SIGMA TAU --space S [--steps K]``: K+1 frames of a
  constant-speed geodesic plus the exact midpoint verification.
- ``probe NAME [flags]``: one of the metric-geometry probes on built-in
  scenario families; the exit code encodes the verdict.

Diagrams are read from files (.csv for two-coordinate plane pairs,
JSON otherwise) or inline JSON; spaces from a file or inline JSON
descriptor.  All randomized scenarios draw from --seed (default 0), so
identical invocations produce byte-identical output.

Exit codes: 0 success/WITNESSED, 1 REFUTED, 2 malformed input or flags,
3 space mismatch, 4 problem too large for exact computation, 5 missing
geodesic oracle or non-proper pair, 6 INCONCLUSIVE.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .diagram import Diagram, canonicalize, parse_diagram
from .errors import (
    CoverageGap,
    EmptyAnnulus,
    InvalidMetric,
    NoGeodesicOracle,
    NotCauchy,
    NotProper,
    NoProjection,
    ParseError,
    PdmetricError,
    PreconditionViolated,
    SpaceMismatch,
    TooLarge,
)
from .geodesics import c0_truncation_gap, geodesic_between, midpoint_check
from .matching import bottleneck, matching_to_json, wasserstein
from .probes import (
    ProbeReport,
    Verdict,
    dense_family,
    approximate_from_family,
    greedy_eps_net,
    isolated_point_bound,
    net_growth_probe,
    separability_adversary,
    vanishing_pair_demo,
    cauchy_chain_limit,
)
from .spaces import (
    EUCLIDEAN,
    SUP,
    FiniteExplicit,
    HalfLineOrigin,
    MetricPair,
    PlaneDiagonal,
    space_from_json,
)

__all__ = ["CliConfig", "fmt_real", "main"]

_EXIT_BY_VERDICT = {Verdict.WITNESSED: 0, Verdict.REFUTED: 1, Verdict.INCONCLUSIVE: 6}


@dataclasses.dataclass(frozen=True)
class CliConfig:
    space: MetricPair | None
    p: float
    steps: int
    seed: int
    fmt: str
    matching_out: str | None
    jobs: int


def fmt_real(x: float) -> str:
    """Shortest decimal that parses back to x, capped at 12 significant
    digits (beyond the cap, nearest 12-digit decimal)."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    for k in range(1, 13):
        s = "%.*g" % (k, x)
        if float(s) == x:
            return s
    return "%.12g" % x


def _err(msg) -> None:
    print(f"pdmetric: error: {msg}", file=sys.stderr)


def _load_space(spec: str, norm: str | None) -> MetricPair:
    if spec is None:
        raise ParseError("--space is required for this command")
    text = spec
    if not spec.lstrip().startswith("{"):
        try:
            with open(spec, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            raise ParseError(f"cannot read space file {spec!r}: {e}") from e
    pair = space_from_json(text)
    if norm is not None:
        obj = pair.to_json()
        if "norm" not in obj:
            raise ParseError(f"space kind {pair.kind} has no norm choice")
        obj["norm"] = norm
        pair = space_from_json(obj)
    return pair


def _load_diagram(spec: str, pair: MetricPair) -> Diagram:
    if spec.lstrip().startswith("{"):
        return parse_diagram(spec, "json", pair)
    try:
        with open(spec, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise ParseError(f"cannot read diagram file {spec!r}: {e}") from e
    fmt = "csv" if spec.endswith(".csv") else "json"
    return parse_diagram(text, fmt, pair)


def _parse_p(raw: str) -> float:
    if raw == "inf":
        return math.inf
    try:
        p = float(raw)
    except ValueError as e:
        raise ParseError(f"--p must be 'inf' or a real >= 1, got {raw!r}") from e
    if not p >= 1.0:
        raise ParseError(f"--p must be >= 1, got {p}")
    return p


# -- dist ------------------------------------------------------------------


def cmd_dist(args) -> int:
    pair = _load_space(args.space, args.norm)
    sigma = _load_diagram(args.sigma, pair)
    tau = _load_diagram(args.tau, pair)
    p = _parse_p(args.p)
    if math.isinf(p):
        value, matching = bottleneck(sigma, tau, pair)
    else:
        value, matching = wasserstein(sigma, tau, p, pair)
    if args.matching:
        with open(args.matching, "w", encoding="utf-8") as fh:
            json.dump(matching_to_json(matching), fh, sort_keys=True)
            fh.write("\n")
    print(fmt_real(value))
    return 0


# -- geodesic ----------------------------------------------------------------


def cmd_geodesic(args) -> int:
    pair = _load_space(args.space, args.norm)
    sigma = _load_diagram(args.sigma, pair)
    tau = _load_diagram(args.tau, pair)
    steps = args.steps
    if steps < 1:
        raise ParseError(f"--steps must be at least 1, got {steps}")
    path = geodesic_between(sigma, tau, pair)
    frames = []
    for i in range(steps + 1):
        t = i / steps
        frames.append((t, path.at(t)))
    check = midpoint_check(sigma, tau, pair, grid=steps + 1)
    if args.format == "csv":
        if pair.dim != 2:
            raise ParseError("CSV frames are only defined for two-coordinate plane pairs")
        lines = ["t,birth,death,mult"]
        for t, frame in frames:
            for pt, m in frame.points:
                lines.append(f"{t!r},{pt.coords[0]!r},{pt.coords[1]!r},{m}")
        lines.append(
            f"# midpoint_check={check.verdict.value}"
            f" max_deviation={fmt_real(check.witnesses['max_deviation'])}"
        )
        print("\n".join(lines))
    else:
        out = {
            "value": path.value,
            "frames": [
                {
                    "t": t,
                    "points": [
                        {"coords": [float(c) for c in pt.coords], "mult": m}
                        for pt, m in frame.points
                    ],
                }
                for t, frame in frames
            ],
            "midpoint_check": check.to_json(),
        }
        print(json.dumps(out, sort_keys=True))
    return 0 if check.verdict is Verdict.WITNESSED else 1


# -- probe scenarios ---------------------------------------------------------


def _plane() -> PlaneDiagonal:
    return PlaneDiagonal(1, SUP)


def _random_finite_pair(rng: np.random.Generator) -> FiniteExplicit:
    npts = int(rng.integers(4, 9))
    coords = rng.uniform(0.0, 10.0, size=(npts, 2))
    diff = coords[:, None, :] - coords[None, :, :]
    matrix = np.abs(diff).max(axis=-1)
    return FiniteExplicit(matrix, [npts - 1])


def _random_finite_diagram(
    pair: FiniteExplicit, rng: np.random.Generator
) -> Diagram:
    pts = pair.points_off_A()
    chosen = []
    for p in pts:
        m = int(rng.integers(0, 3))
        if m:
            chosen.append((p, m))
    return canonicalize(chosen, pair)


def _isolated_trial(seed: int) -> dict:
    rng = np.random.default_rng(seed)
    pair = _random_finite_pair(rng)
    sigma = _random_finite_diagram(pair, rng)
    tau = _random_finite_diagram(pair, rng)
    while tau == sigma:
        tau = _random_finite_diagram(pair, rng)
    eps, dist, report = isolated_point_bound(pair, sigma, tau)
    return {
        "epsilon": eps,
        "distance": dist,
        "ok": report.verdict is Verdict.WITNESSED,
    }


def probe_isolated_bound(args) -> ProbeReport:
    trials = args.trials
    if trials < 1:
        raise ParseError("--trials must be at least 1")
    rng = np.random.default_rng(args.seed)
    seeds = [int(s) for s in rng.integers(0, 2**62, size=trials)]
    results = _map_jobs(_isolated_trial, seeds, args.jobs)
    trace = tuple(
        (float(i), r["distance"] - r["epsilon"]) for i, r in enumerate(results)
    )
    all_ok = all(r["ok"] for r in results)
    return ProbeReport(
        probe_name="isolated_point_bound",
        verdict=Verdict.WITNESSED if all_ok else Verdict.REFUTED,
        witnesses={"trials": trials, "failures": sum(not r["ok"] for r in results)},
        numeric_trace=trace,
    )


def probe_vanishing_pair(args) -> ProbeReport:
    pair = _plane()
    x = pair.point(0.0, 4.0)
    tail = [
        pair.point(1.0 / n, 4.0 + 1.0 / n) for n in range(1, args.nmax + 2)
    ]
    return vanishing_pair_demo(pair, x, tail, n_max=args.nmax, target=args.target)


_CAUCHY_SCENARIOS = ("constant", "converging", "absorbing")


def _cauchy_sequence(name: str, pair: PlaneDiagonal) -> list[Diagram]:
    ns = [4**k for k in range(13)]
    if name == "constant":
        d = canonicalize([pair.point(0.0, 4.0), pair.point(1.0, 3.0)], pair)
        return [d for _ in ns]
    if name == "converging":
        return [canonicalize([pair.point(0.0, 4.0 + 1.0 / n)], pair) for n in ns]
    if name == "absorbing":
        return [canonicalize([pair.point(1.0 / n, 2.0 / n)], pair) for n in ns]
    raise ParseError(f"unknown cauchy scenario {name!r}")


def probe_cauchy_chain(args) -> list[ProbeReport]:
    pair = _plane()
    names = _CAUCHY_SCENARIOS if args.scenario == "all" else (args.scenario,)
    reports = []
    for name in names:
        seq = _cauchy_sequence(name, pair)
        _, report = cauchy_chain_limit(seq, pair)
        reports.append(
            dataclasses.replace(
                report,
                probe_name=f"cauchy_chain_limit[{name}]",
            )
        )
    return reports


def probe_eps_net(args) -> ProbeReport:
    delta, D = args.delta, args.D
    epsilon = args.epsilon if args.epsilon is not None else 0.25
    if args.scenario == "half-line":
        pair = HalfLineOrigin()
        batches = []
        for h in (0.2, 0.1, 0.05, 0.02):
            xs = np.arange(delta, D, h)
            batches.append([pair.point(float(v)) for v in xs])
        net, report = net_growth_probe(pair, delta, D, epsilon, batches)
        bound = math.ceil((D - delta) / epsilon) + 1
        witnesses = dict(report.witnesses)
        witnesses["size_bound"] = bound
        witnesses["within_bound"] = len(net.centers) <= bound
        return dataclasses.replace(report, witnesses=witnesses)
    if args.scenario == "strip":
        pair = _plane()
        gap = delta + D  # birth-death gap keeping dist-to-A inside [delta, D)
        batches = []
        for extent in (4, 8, 16, 32):
            batches.append(
                [pair.point(float(b), float(b) + gap) for b in range(extent + 1)]
            )
        _, report = net_growth_probe(pair, delta, D, epsilon, batches)
        return report
    raise ParseError(f"unknown eps-net scenario {args.scenario!r}")


def _dense_trial(payload) -> dict:
    family, seed, n = payload
    rng = np.random.default_rng(seed)
    pair = family.pair
    size = int(rng.integers(0, 7))
    pts = []
    for _ in range(size):
        v = float(rng.uniform(0.0, float(n)))
        m = int(rng.integers(1, 4))
        pts.append((pair.point(v), m))
    sigma = canonicalize(pts, pair)
    _, err = approximate_from_family(sigma, family)
    return {"error": err, "ok": err <= family.radius}


def probe_dense_family(args) -> ProbeReport:
    n = args.n
    trials = args.trials
    if n < 1:
        raise ParseError("--n must be at least 1")
    if trials < 1:
        raise ParseError("--trials must be at least 1")
    pair = HalfLineOrigin()
    radius = 1.0 / n
    h = radius / 4.0
    samples = [pair.point(float(v)) for v in np.arange(radius, float(n), h)]
    net = greedy_eps_net(pair, radius, float(n), radius / 2.0, samples)
    family = dense_family(pair, n, net, validation_samples=samples)
    rng = np.random.default_rng(args.seed)
    seeds = [int(s) for s in rng.integers(0, 2**62, size=trials)]
    results = _map_jobs(_dense_trial, [(family, s, n) for s in seeds], args.jobs)
    trace = tuple((float(i), r["error"]) for i, r in enumerate(results))
    failures = sum(not r["ok"] for r in results)
    return ProbeReport(
        probe_name="dense_family",
        verdict=Verdict.WITNESSED if failures == 0 else Verdict.REFUTED,
        witnesses={
            "n": n,
            "radius": radius,
            "family_size": len(family.centers),
            "trials": trials,
            "failures": failures,
        },
        numeric_trace=trace,
    )


def probe_adversary(args) -> ProbeReport:
    k = args.candidates
    if k < 1:
        raise ParseError("--candidates must be at least 1")
    delta, D = args.delta, args.D
    epsilon = args.epsilon if args.epsilon is not None else 1.0
    pair = _plane()
    mid = delta + D  # gap giving dist-to-A = (delta + D) / 2, inside [delta, D)
    spread = max(3.0 * epsilon, 3.0)
    xs = [pair.point(spread * i, spread * i + mid) for i in range(k)]
    rng = np.random.default_rng(args.seed)
    candidates = []
    for _ in range(k):
        size = int(rng.integers(0, 6))
        pts = []
        for _ in range(size):
            b = float(rng.uniform(0.0, spread * k))
            g = float(rng.uniform(0.0, 2.0 * mid))
            pts.append(pair.point(b, b + g))
        candidates.append(canonicalize(pts, pair))
    _, report = separability_adversary(pair, candidates, delta, D, epsilon, xs)
    return report


def probe_c0_gap(args) -> ProbeReport:
    if args.sweep:
        reports = []
        gaps = []
        for m in range(2, args.m + 1):
            gap, rep = c0_truncation_gap(m)
            reports.append(rep)
            gaps.append(gap)
        decreasing = all(b < a for a, b in zip(gaps, gaps[1:]))
        ok = decreasing and all(r.verdict is Verdict.WITNESSED for r in reports)
        return ProbeReport(
            probe_name="c0_truncation_gap[sweep]",
            verdict=Verdict.WITNESSED if ok else Verdict.REFUTED,
            witnesses={
                "gaps": gaps,
                "strictly_decreasing": decreasing,
                "limit": 1.0,
            },
            numeric_trace=tuple((float(m), g) for m, g in zip(range(2, args.m + 1), gaps)),
        )
    _, report = c0_truncation_gap(args.m)
    return report


def _map_jobs(func, items, jobs: int):
    if jobs <= 1 or len(items) <= 1:
        return [func(it) for it in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, items))


def cmd_probe(args) -> int:
    dispatch = {
        "isolated-bound": probe_isolated_bound,
        "vanishing-pair": probe_vanishing_pair,
        "cauchy-chain": probe_cauchy_chain,
        "eps-net": probe_eps_net,
        "dense-family": probe_dense_family,
        "adversary": probe_adversary,
        "c0-gap": probe_c0_gap,
    }
    result = dispatch[args.name](args)
    reports = result if isinstance(result, list) else [result]
    if args.format == "csv":
        lines = ["param,value"]
        for rep in reports:
            for a, b in rep.numeric_trace:
                lines.append(f"{a!r},{b!r}")
        print("\n".join(lines))
    else:
        payload = [rep.to_json() for rep in reports]
        print(json.dumps(payload[0] if len(payload) == 1 else payload, sort_keys=True))
    worst = max(_EXIT_BY_VERDICT[rep.verdict] for rep in reports)
    return worst


# -- parser ------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pdmetric",
        description="Exact distances, geodesics, and metric-geometry probes "
        "for persistence diagrams over metric pairs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="PRNG seed (default 0)")
    common.add_argument(
        "--format", choices=("json", "csv"), default="json", help="output format"
    )
    common.add_argument(
        "--jobs", type=int, default=1, help="worker processes for batch probes"
    )

    spacey = argparse.ArgumentParser(add_help=False)
    spacey.add_argument("--space", required=True, help="space descriptor file or inline JSON")
    spacey.add_argument("--norm", choices=(SUP, EUCLIDEAN), default=None,
                        help="override the space norm")

    p_dist = sub.add_parser("dist", parents=[common, spacey],
                            help="exact distance between two diagrams")
    p_dist.add_argument("sigma", help="diagram file or inline JSON")
    p_dist.add_argument("tau", help="diagram file or inline JSON")
    p_dist.add_argument("--p", default="inf", help="inf for bottleneck, else real >= 1")
    p_dist.add_argument("--matching", default=None, help="write the optimal matching JSON here")
    p_dist.set_defaults(func=cmd_dist)

    p_geo = sub.add_parser("geodesic", parents=[common, spacey],
                           help="constant-speed geodesic between two diagrams")
    p_geo.add_argument("sigma", help="diagram file or inline JSON")
    p_geo.add_argument("tau", help="diagram file or inline JSON")
    p_geo.add_argument("--steps", type=int, default=10, help="number of segments (emits steps+1 frames)")
    p_geo.set_defaults(func=cmd_geodesic)

    p_probe = sub.add_parser("probe", parents=[common],
                             help="run a metric-geometry probe")
    p_probe.add_argument(
        "name",
        choices=(
            "isolated-bound",
            "vanishing-pair",
            "cauchy-chain",
            "eps-net",
            "dense-family",
            "adversary",
            "c0-gap",
        ),
    )
    p_probe.add_argument("--trials", type=int, default=20, help="trial count for batch probes")
    p_probe.add_argument("--nmax", type=int, default=50, help="vanishing-pair sequence length")
    p_probe.add_argument("--target", type=float, default=0.05, help="vanishing-pair final bound")
    p_probe.add_argument("--scenario", default=None,
                         help="cauchy-chain: constant|converging|absorbing|all; "
                              "eps-net: half-line|strip")
    p_probe.add_argument("--delta", type=float, default=1.0, help="annulus inner radius")
    p_probe.add_argument("--D", type=float, default=2.0, help="annulus outer radius")
    p_probe.add_argument("--epsilon", type=float, default=None,
                         help="separation scale (eps-net: 0.25, adversary: 1.0)")
    p_probe.add_argument("--n", type=int, default=10, help="dense-family level")
    p_probe.add_argument("--candidates", type=int, default=10, help="adversary candidate count")
    p_probe.add_argument("--m", type=int, default=6, help="c0-gap truncation dimension")
    p_probe.add_argument("--sweep", action="store_true", help="c0-gap: sweep m from 2")
    p_probe.set_defaults(func=cmd_probe)

    return parser


_ERROR_EXITS = (
    (ParseError, 2),
    (InvalidMetric, 2),
    (PreconditionViolated, 2),
    (NotCauchy, 2),
    (EmptyAnnulus, 2),
    (CoverageGap, 2),
    (SpaceMismatch, 3),
    (TooLarge, 4),
    (NoGeodesicOracle, 5),
    (NoProjection, 5),
    (NotProper, 5),
)


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command == "probe":
        if args.name == "cauchy-chain" and args.scenario is None:
            args.scenario = "all"
        if args.name == "eps-net" and args.scenario is None:
            args.scenario = "half-line"
    try:
        return args.func(args)
    except PdmetricError as e:
        for etype, code in _ERROR_EXITS:
            if isinstance(e, etype):
                _err(e)
                return code
        _err(e)
        return 2
    except ValueError as e:
        _err(e)
        return 2


if __name__ == "__main__":
    sys.exit(main())
