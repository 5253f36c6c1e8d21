"""Computable metric pairs (X, A) and the quotient pseudometric on X/A.

A metric pair is a metric space X together with a distinguished nonempty
closed subset A.  Each descriptor exposes:

- the ambient distance ``dist`` and its vectorized form ``pairwise_dist``,
- the distance-to-A function ``dist_to_A`` / ``dist_to_A_batch``,
- optionally a nearest-point projection onto A and a constant-speed
  geodesic oracle.

Collapsing A to a single basepoint gives the quotient space X/A carrying
the metric ``min(d(x, y), d(x, A) + d(y, A))``; ``QuotientOf`` wraps any
descriptor as that quotient, and the free functions ``quotient_distance``
and ``quotient_geodesic`` evaluate the quotient metric and its geodesics
over the original pair.

All descriptors are immutable and all operations are pure, so values can
be shared freely across threads or processes.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    InvalidMetric,
    NoGeodesicOracle,
    NoProjection,
    NotProper,
    ParseError,
    SpaceMismatch,
)

__all__ = [
    "SUP",
    "EUCLIDEAN",
    "Point",
    "BasepointTag",
    "BASEPOINT",
    "MetricPair",
    "PlaneDiagonal",
    "HalfLineOrigin",
    "FiniteExplicit",
    "SupCubeTruncatedC0",
    "QuotientOf",
    "quotient_distance",
    "project_to_A",
    "quotient_geodesic",
    "space_to_json",
    "space_from_json",
]

SUP = "sup"
EUCLIDEAN = "euclidean"

_NORMS = (SUP, EUCLIDEAN)


@dataclass(frozen=True)
class Point:
    """A point of some metric pair, tagged with the pair's identity."""

    space_id: str
    coords: tuple[float, ...]

    def __repr__(self) -> str:
        inner = ", ".join(repr(c) for c in self.coords)
        return f"({inner})"


class BasepointTag:
    """The collapsed class of A in a quotient space.  Singleton."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "A"

    def __deepcopy__(self, memo):
        return self

    def __copy__(self):
        return self


BASEPOINT = BasepointTag()


def _as_float_tuple(coords: Sequence[float]) -> tuple[float, ...]:
    return tuple(float(c) for c in coords)


class MetricPair:
    """Abstract base for metric pair descriptors.

    Subclasses set ``kind``, ``dim``, ``space_id``, ``is_proper``,
    ``has_projection``, ``has_geodesic`` and implement ``_validate_coords``,
    ``pairwise_dist`` and ``dist_to_A_batch``.  Scalar distance queries are
    derived from the vectorized ones, so the two can never disagree.
    """

    kind: str
    norm: str | None = None
    dim: int
    space_id: str
    is_proper: bool = True
    has_projection: bool = True
    has_geodesic: bool = True

    # -- points -------------------------------------------------------

    def point(self, *coords: float) -> Point:
        c = _as_float_tuple(coords[0] if len(coords) == 1 and not _is_number(coords[0]) else coords)
        self._validate_coords(c)
        return Point(self.space_id, c)

    def _validate_coords(self, coords: tuple[float, ...]) -> None:
        raise NotImplementedError

    def owns(self, p: Point | BasepointTag) -> bool:
        if isinstance(p, BasepointTag):
            return isinstance(self, QuotientOf)
        return p.space_id == self.space_id

    def check_point(self, p: Point | BasepointTag) -> None:
        if isinstance(p, BasepointTag):
            if not isinstance(self, QuotientOf):
                raise SpaceMismatch("basepoint tag only lives in a quotient space")
            return
        if p.space_id != self.space_id:
            raise SpaceMismatch(
                f"point from space {p.space_id!r} used with space {self.space_id!r}"
            )

    def coords_matrix(self, points: Sequence[Point]) -> np.ndarray:
        out = np.empty((len(points), self.dim), dtype=np.float64)
        for i, p in enumerate(points):
            self.check_point(p)
            out[i, :] = p.coords
        return out

    # -- distances ----------------------------------------------------

    def pairwise_dist(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        """Matrix of ambient distances between two coordinate arrays."""
        raise NotImplementedError

    def dist_to_A_batch(self, xs: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def dist(self, x: Point | BasepointTag, y: Point | BasepointTag) -> float:
        self.check_point(x)
        self.check_point(y)
        a = np.array([x.coords], dtype=np.float64)
        b = np.array([y.coords], dtype=np.float64)
        return float(self.pairwise_dist(a, b)[0, 0])

    def dist_to_A(self, x: Point | BasepointTag) -> float:
        self.check_point(x)
        a = np.array([x.coords], dtype=np.float64)
        return float(self.dist_to_A_batch(a)[0])

    # -- optional oracles ---------------------------------------------

    def proj_to_A(self, x: Point | BasepointTag) -> Point | BasepointTag:
        raise NoProjection(f"{self.kind} has no nearest-point projection onto A")

    def geodesic(self, x, y, t: float):
        raise NoGeodesicOracle(f"{self.kind} has no geodesic oracle")

    # -- serialization --------------------------------------------------

    def to_json(self) -> dict:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.space_id}>"

    def __eq__(self, other) -> bool:
        return isinstance(other, MetricPair) and other.space_id == self.space_id

    def __hash__(self) -> int:
        return hash(self.space_id)


def _is_number(v) -> bool:
    return isinstance(v, (int, float, np.floating, np.integer))


def _check_t(t: float) -> float:
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"interpolation parameter must lie in [0, 1], got {t}")
    return t


def _lerp(x: tuple[float, ...], y: tuple[float, ...], t: float) -> tuple[float, ...]:
    return tuple((1.0 - t) * a + t * b for a, b in zip(x, y))


class _VectorPair(MetricPair):
    """Shared machinery for pairs whose points are real vectors and whose
    geodesics are straight segments (constant speed in both norms)."""

    def _norm_batch(self, diffs: np.ndarray) -> np.ndarray:
        # diffs has shape (..., dim)
        if self.norm == EUCLIDEAN:
            return np.sqrt((diffs * diffs).sum(axis=-1))
        return np.abs(diffs).max(axis=-1)

    def pairwise_dist(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        return self._norm_batch(xs[:, None, :] - ys[None, :, :])

    def geodesic(self, x: Point, y: Point, t: float) -> Point:
        self.check_point(x)
        self.check_point(y)
        t = _check_t(t)
        return Point(self.space_id, _lerp(x.coords, y.coords, t))


class PlaneDiagonal(_VectorPair):
    """Half-plane pairs {(b, d) : b <= d} with A the diagonal, and their
    higher products: n two-coordinate blocks, each above its own diagonal.

    The classical persistence plane is ``PlaneDiagonal()`` (one block).
    Distances use the sup norm by default; the Euclidean norm is available
    for both the plane and products.
    """

    def __init__(self, n_pairs: int = 1, norm: str = SUP):
        if norm not in _NORMS:
            raise ValueError(f"unknown norm {norm!r}")
        n_pairs = int(n_pairs)
        if n_pairs < 1:
            raise ValueError("n_pairs must be at least 1")
        self.n_pairs = n_pairs
        self.norm = norm
        self.dim = 2 * n_pairs
        self.kind = "EuclideanPlaneDiagonal" if n_pairs == 1 else "HalfPlane2nDiagonal"
        self.space_id = f"plane{self.dim}:{norm}"

    def _validate_coords(self, coords: tuple[float, ...]) -> None:
        if len(coords) != self.dim:
            raise ValueError(f"expected {self.dim} coordinates, got {len(coords)}")
        for k in range(self.n_pairs):
            b, d = coords[2 * k], coords[2 * k + 1]
            if not (math.isfinite(b) and math.isfinite(d)):
                raise ValueError("coordinates must be finite")
            if d < b:
                raise ValueError(f"coordinate pair ({b}, {d}) lies below the diagonal")

    def dist_to_A_batch(self, xs: np.ndarray) -> np.ndarray:
        half_gaps = (xs[:, 1::2] - xs[:, 0::2]) * 0.5
        # rounding in interpolated points can leave a gap of -0.0 scale dust
        half_gaps = np.maximum(half_gaps, 0.0)
        if self.norm == EUCLIDEAN:
            return np.sqrt(2.0 * (half_gaps * half_gaps).sum(axis=-1))
        return half_gaps.max(axis=-1)

    def proj_to_A(self, x: Point) -> Point:
        self.check_point(x)
        c = x.coords
        out = []
        for k in range(self.n_pairs):
            m = (c[2 * k] + c[2 * k + 1]) * 0.5
            out.extend((m, m))
        return Point(self.space_id, tuple(out))

    def to_json(self) -> dict:
        return {"kind": self.kind, "norm": self.norm, "dim": self.dim}


class HalfLineOrigin(MetricPair):
    """The half-line [0, inf) with A = {0}."""

    def __init__(self):
        self.kind = "HalfLineOrigin"
        self.dim = 1
        self.space_id = "halfline"

    def _validate_coords(self, coords: tuple[float, ...]) -> None:
        if len(coords) != 1:
            raise ValueError(f"expected 1 coordinate, got {len(coords)}")
        if not math.isfinite(coords[0]) or coords[0] < 0.0:
            raise ValueError("half-line points are finite reals >= 0")

    def pairwise_dist(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        return np.abs(xs[:, None, 0] - ys[None, :, 0])

    def dist_to_A_batch(self, xs: np.ndarray) -> np.ndarray:
        return np.maximum(xs[:, 0], 0.0)

    def proj_to_A(self, x: Point) -> Point:
        self.check_point(x)
        return Point(self.space_id, (0.0,))

    def geodesic(self, x: Point, y: Point, t: float) -> Point:
        self.check_point(x)
        self.check_point(y)
        t = _check_t(t)
        return Point(self.space_id, _lerp(x.coords, y.coords, t))

    def to_json(self) -> dict:
        return {"kind": self.kind, "dim": self.dim}


class SupCubeTruncatedC0(MetricPair):
    """R^m with the sup norm and A = {0}: the m-coordinate truncation of
    the space of vanishing sequences.  Geodesics are straight segments."""

    MAX_DIM = 12

    def __init__(self, m: int):
        m = int(m)
        if m < 1:
            raise ValueError("m must be at least 1")
        if m > self.MAX_DIM:
            raise ValueError(f"m capped at {self.MAX_DIM} for exact enumeration")
        self.kind = "SupCubeTruncatedC0"
        self.norm = SUP
        self.dim = m
        self.space_id = f"supcube{m}"

    def _validate_coords(self, coords: tuple[float, ...]) -> None:
        if len(coords) != self.dim:
            raise ValueError(f"expected {self.dim} coordinates, got {len(coords)}")
        if not all(math.isfinite(c) for c in coords):
            raise ValueError("coordinates must be finite")

    def pairwise_dist(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        return np.abs(xs[:, None, :] - ys[None, :, :]).max(axis=-1)

    def dist_to_A_batch(self, xs: np.ndarray) -> np.ndarray:
        return np.abs(xs).max(axis=-1)

    def proj_to_A(self, x: Point) -> Point:
        self.check_point(x)
        return Point(self.space_id, (0.0,) * self.dim)

    def geodesic(self, x: Point, y: Point, t: float) -> Point:
        self.check_point(x)
        self.check_point(y)
        t = _check_t(t)
        return Point(self.space_id, _lerp(x.coords, y.coords, t))

    def to_json(self) -> dict:
        return {"kind": self.kind, "dim": self.dim}


class FiniteExplicit(MetricPair):
    """A finite metric space given by an explicit distance matrix, with A
    a chosen nonempty subset of indices.  Points are integer indices; no
    projection or geodesic oracle is provided (projection is just a
    nearest-A lookup, but interpolation has no meaning here)."""

    has_projection = True
    has_geodesic = False

    def __init__(self, matrix: Sequence[Sequence[float]], A: Sequence[int], tol: float = 1e-9):
        M = np.asarray(matrix, dtype=np.float64)
        if M.ndim != 2 or M.shape[0] != M.shape[1]:
            raise InvalidMetric("distance matrix must be square")
        n = M.shape[0]
        if n == 0:
            raise InvalidMetric("distance matrix must be nonempty")
        if not np.all(np.isfinite(M)):
            raise InvalidMetric("distances must be finite")
        if np.any(M < 0):
            raise InvalidMetric("distances must be nonnegative")
        if np.any(np.abs(np.diagonal(M)) > 0):
            raise InvalidMetric("diagonal must be zero")
        if not np.array_equal(M, M.T):
            raise InvalidMetric("distance matrix must be symmetric")
        # triangle inequality, allowing float slack
        for k in range(n):
            if np.any(M > M[:, k, None] + M[None, k, :] + tol):
                raise InvalidMetric("triangle inequality violated")
        a_idx = sorted({int(i) for i in A})
        if not a_idx:
            raise InvalidMetric("A must be nonempty")
        if a_idx[0] < 0 or a_idx[-1] >= n:
            raise InvalidMetric("A indices out of range")
        self.matrix = M
        self.matrix.setflags(write=False)
        self.A_indices = tuple(a_idx)
        self.kind = "FiniteExplicit"
        self.dim = 1
        self.size = n
        digest = hashlib.sha256(M.tobytes() + bytes(str(self.A_indices), "ascii")).hexdigest()[:12]
        self.space_id = f"finite:{digest}"
        self._a_dist = M[:, a_idx].min(axis=1)
        self._a_nearest = np.asarray(a_idx, dtype=np.int64)[M[:, a_idx].argmin(axis=1)]

    def _validate_coords(self, coords: tuple[float, ...]) -> None:
        if len(coords) != 1:
            raise ValueError("finite-space points are single indices")
        i = coords[0]
        if i != int(i) or not 0 <= int(i) < self.size:
            raise ValueError(f"index {i} out of range for {self.size} points")

    def _indices(self, xs: np.ndarray) -> np.ndarray:
        return xs[:, 0].astype(np.int64)

    def pairwise_dist(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        return self.matrix[np.ix_(self._indices(xs), self._indices(ys))]

    def dist_to_A_batch(self, xs: np.ndarray) -> np.ndarray:
        return self._a_dist[self._indices(xs)]

    def proj_to_A(self, x: Point) -> Point:
        self.check_point(x)
        return Point(self.space_id, (float(self._a_nearest[int(x.coords[0])]),))

    def points_off_A(self) -> list[Point]:
        a_set = set(self.A_indices)
        return [Point(self.space_id, (float(i),)) for i in range(self.size) if i not in a_set]

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "dim": 1,
            "points": list(range(self.size)),
            "matrix": [[float(v) for v in row] for row in self.matrix],
            "A": list(self.A_indices),
        }


class QuotientOf(MetricPair):
    """The quotient pair (X/A, {A}) of an inner pair, carrying the metric
    min(d(x, y), d(x, A) + d(y, A)).  The collapsed class of A is the
    BASEPOINT tag; all other points keep their inner coordinates."""

    def __init__(self, inner: MetricPair):
        self.inner = inner
        self.kind = "QuotientOf"
        self.norm = inner.norm
        self.dim = inner.dim
        self.is_proper = inner.is_proper
        self.has_projection = True
        self.has_geodesic = inner.has_geodesic and inner.has_projection
        self.space_id = f"quotient({inner.space_id})"

    def _validate_coords(self, coords: tuple[float, ...]) -> None:
        self.inner._validate_coords(coords)

    def lift(self, p: Point) -> Point:
        """The inner-space point under a quotient point."""
        self.check_point(p)
        return Point(self.inner.space_id, p.coords)

    def lower(self, p: Point | BasepointTag) -> Point | BasepointTag:
        """Map an inner point into the quotient, collapsing A to BASEPOINT."""
        if isinstance(p, BasepointTag):
            return BASEPOINT
        self.inner.check_point(p)
        if self.inner.dist_to_A(p) == 0.0:
            return BASEPOINT
        return Point(self.space_id, p.coords)

    def map_diagram(self, diagram):
        """Rebrand a diagram over the inner pair as one over the quotient."""
        from .diagram import Diagram

        if diagram.space_id != self.inner.space_id:
            raise SpaceMismatch(
                f"diagram lives over {diagram.space_id!r}, not over {self.inner.space_id!r}"
            )
        pts = tuple((Point(self.space_id, p.coords), m) for p, m in diagram.points)
        return Diagram(self.space_id, pts)

    def pairwise_dist(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        D = self.inner.pairwise_dist(xs, ys)
        ax = self.inner.dist_to_A_batch(xs)
        ay = self.inner.dist_to_A_batch(ys)
        return np.minimum(D, ax[:, None] + ay[None, :])

    def dist_to_A_batch(self, xs: np.ndarray) -> np.ndarray:
        return self.inner.dist_to_A_batch(xs)

    def dist(self, x, y) -> float:
        self.check_point(x)
        self.check_point(y)
        x_base = isinstance(x, BasepointTag)
        y_base = isinstance(y, BasepointTag)
        if x_base and y_base:
            return 0.0
        if x_base:
            return self.inner.dist_to_A(self.lift(y))
        if y_base:
            return self.inner.dist_to_A(self.lift(x))
        return quotient_distance(self.inner, self.lift(x), self.lift(y))

    def dist_to_A(self, x) -> float:
        self.check_point(x)
        if isinstance(x, BasepointTag):
            return 0.0
        return self.inner.dist_to_A(self.lift(x))

    def proj_to_A(self, x) -> BasepointTag:
        self.check_point(x)
        return BASEPOINT

    def geodesic(self, x, y, t: float):
        self.check_point(x)
        self.check_point(y)
        t = _check_t(t)
        if not self.has_geodesic:
            raise NoGeodesicOracle(f"{self.inner.kind} has no geodesic oracle")
        x_base = isinstance(x, BasepointTag)
        y_base = isinstance(y, BasepointTag)
        if x_base and y_base:
            return BASEPOINT
        if x_base or y_base:
            # slide along the inner geodesic between the point and its projection
            p = self.lift(y if x_base else x)
            a = self.inner.proj_to_A(p)
            q = self.inner.geodesic(a, p, t) if x_base else self.inner.geodesic(p, a, t)
            return self.lower(q)
        return self.lower(quotient_geodesic(self.inner, self.lift(x), self.lift(y), t))

    def to_json(self) -> dict:
        return {"kind": self.kind, "inner": self.inner.to_json()}


# -- quotient operations over an arbitrary pair -------------------------


def quotient_distance(pair: MetricPair, x, y) -> float:
    """min(d(x, y), d(x, A) + d(y, A)): the distance in X/A between the
    classes of x and y."""
    return min(pair.dist(x, y), pair.dist_to_A(x) + pair.dist_to_A(y))


def project_to_A(pair: MetricPair, x) -> Point | BasepointTag:
    """Nearest point of A; raises NoProjection when the pair has none."""
    return pair.proj_to_A(x)


def quotient_geodesic(pair: MetricPair, x, y, t: float):
    """Evaluate at time t a constant-speed quotient geodesic from x to y.

    When d(x, y) <= d(x, A) + d(y, A) the ambient geodesic is already a
    quotient geodesic; otherwise the path runs x -> A -> y through the two
    projections, parametrized by arclength.  Points reaching A are reported
    as BASEPOINT.
    """
    if not pair.has_geodesic:
        raise NoGeodesicOracle(f"{pair.kind} has no geodesic oracle")
    if not pair.has_projection:
        raise NoProjection(f"{pair.kind} has no nearest-point projection onto A")
    if not pair.is_proper:
        raise NotProper("quotient geodesics need a proper pair")
    t = _check_t(t)
    pair.check_point(x)
    pair.check_point(y)
    ax = pair.dist_to_A(x)
    ay = pair.dist_to_A(y)
    if pair.dist(x, y) <= ax + ay:
        p = pair.geodesic(x, y, t)
    else:
        total = ax + ay
        if total == 0.0:
            return BASEPOINT
        s = t * total
        if s < ax:
            p = pair.geodesic(x, pair.proj_to_A(x), s / ax)
        elif s > ax:
            # remaining arclength s - ax measured from A toward y
            p = pair.geodesic(pair.proj_to_A(y), y, (s - ax) / ay)
        else:
            return BASEPOINT
    if isinstance(p, BasepointTag) or pair.dist_to_A(p) == 0.0:
        return BASEPOINT
    return p


# -- serialization -------------------------------------------------------

_PLANE_KINDS = {"EuclideanPlaneDiagonal", "HalfPlane2nDiagonal"}


def space_to_json(pair: MetricPair) -> dict:
    return pair.to_json()


def space_from_json(obj: dict | str) -> MetricPair:
    """Build a descriptor from its JSON form (dict or JSON text)."""
    if isinstance(obj, (str, bytes)):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as e:
            raise ParseError(f"invalid space JSON: {e}") from e
    if not isinstance(obj, dict):
        raise ParseError("space descriptor must be a JSON object")
    kind = obj.get("kind")
    if kind in _PLANE_KINDS:
        norm = obj.get("norm", SUP)
        dim = int(obj.get("dim", 2))
        if dim % 2 != 0 or dim < 2:
            raise ParseError(f"plane-kind spaces need even dim >= 2, got {dim}")
        if kind == "EuclideanPlaneDiagonal" and dim != 2:
            raise ParseError("EuclideanPlaneDiagonal has dim 2")
        try:
            return PlaneDiagonal(dim // 2, norm)
        except ValueError as e:
            raise ParseError(str(e)) from e
    if kind == "HalfLineOrigin":
        return HalfLineOrigin()
    if kind == "SupCubeTruncatedC0":
        if "dim" not in obj:
            raise ParseError("SupCubeTruncatedC0 needs a dim field")
        try:
            return SupCubeTruncatedC0(int(obj["dim"]))
        except ValueError as e:
            raise ParseError(str(e)) from e
    if kind == "FiniteExplicit":
        if "matrix" not in obj or "A" not in obj:
            raise ParseError("FiniteExplicit needs matrix and A fields")
        try:
            return FiniteExplicit(obj["matrix"], obj["A"])
        except InvalidMetric:
            raise
        except (TypeError, ValueError) as e:
            raise ParseError(f"bad FiniteExplicit descriptor: {e}") from e
    if kind == "QuotientOf":
        if "inner" not in obj:
            raise ParseError("QuotientOf needs an inner descriptor")
        return QuotientOf(space_from_json(obj["inner"]))
    raise ParseError(f"unknown space kind {kind!r}")
