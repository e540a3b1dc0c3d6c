"""Scalar metric spaces, compact value sets and the Pompeiu-Hausdorff distance.

Points are plain floats. A :class:`MetricRule` bundles a distance function with
the carrier it is defined on, so membership errors surface at the first
distance evaluation instead of deep inside an iteration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence, Union

import numpy as np

INFINITY = math.inf
"""Sentinel for unbounded Hausdorff configurations. Never produced by the builtin set variants."""

CARRIER_TOL = 1e-12


class DomainError(ValueError):
    """A point or set lies outside the carrier of the metric space."""


class PreconditionError(ValueError):
    """An operation was called with inputs that violate its contract."""


# {{{ compact sets


@dataclass(frozen=True)
class FinitePoints:
    points: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.points) == 0:
            raise ValueError("FinitePoints needs at least one point")
        pts = tuple(sorted({float(p) for p in self.points}))
        object.__setattr__(self, "points", pts)

    def __contains__(self, x: float) -> bool:
        return float(x) in self.points

    def __str__(self) -> str:
        return "{" + ", ".join(_fmt(p) for p in self.points) + "}"


@dataclass(frozen=True)
class Interval:
    lo: float
    hi: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "lo", float(self.lo))
        object.__setattr__(self, "hi", float(self.hi))
        if not self.lo <= self.hi:
            raise ValueError(f"Interval needs lo <= hi, got [{self.lo}, {self.hi}]")

    def __contains__(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def clamp(self, x: float) -> float:
        return min(max(x, self.lo), self.hi)

    def __str__(self) -> str:
        return f"[{_fmt(self.lo)}, {_fmt(self.hi)}]"


CompactSet = Union[FinitePoints, Interval]


def points(*values: float) -> FinitePoints:
    return FinitePoints(tuple(values))


def _fmt(v: float) -> str:
    return format(v, ".12g")


def format_set(s: CompactSet) -> str:
    """Canonical text form used in reports."""
    return str(s)


# }}}


# {{{ metric rules


class MetricRule:
    """Base class; subclasses define ``kind``, ``_d`` and ``in_carrier``."""

    kind: str = "abstract"

    def in_carrier(self, x: float) -> bool:
        raise NotImplementedError

    def _d(self, x: float, y: float) -> float:
        raise NotImplementedError

    def pairwise(self, xs: Sequence[float], ys: Sequence[float]) -> np.ndarray:
        """Distance matrix ``d(xs[i], ys[j])`` without carrier checks."""
        return np.array([[self._d(x, y) for y in ys] for x in xs], dtype=float).reshape(len(xs), len(ys))

    def check_point(self, x: float) -> None:
        if not self.in_carrier(x):
            raise DomainError(f"point {x!r} is outside the carrier of {self.kind}")

    def check_set(self, s: CompactSet) -> None:
        if isinstance(s, FinitePoints):
            for p in s.points:
                self.check_point(p)
        else:
            self.check_point(s.lo)
            self.check_point(s.hi)

    def describe(self) -> dict:
        return {"kind": self.kind}


@dataclass(frozen=True)
class AbsoluteDifference(MetricRule):
    """``|x - y|`` on the real line, or on ``[lo, hi]`` when a carrier is given."""

    carrier: tuple[float, float] | None = None
    kind: str = field(default="absolute-difference", init=False)

    def in_carrier(self, x: float) -> bool:
        if not math.isfinite(x):
            return False
        if self.carrier is None:
            return True
        lo, hi = self.carrier
        return lo - CARRIER_TOL <= x <= hi + CARRIER_TOL

    def _d(self, x: float, y: float) -> float:
        return abs(x - y)

    def pairwise(self, xs, ys) -> np.ndarray:
        return np.abs(np.subtract.outer(np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)))

    def describe(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.carrier is not None:
            out["carrier"] = list(self.carrier)
        return out


@dataclass(frozen=True)
class MaxOutsideMetric(MetricRule):
    """``|x - y|`` inside the core interval, ``max(x, y)`` once either point leaves it.

    The carrier is the core interval together with the even integers from
    ``evens_from`` upward.
    """

    core: tuple[float, float] = (0.0, 2.0)
    evens_from: int = 4
    kind: str = field(default="max-outside", init=False)

    def in_core(self, x: float) -> bool:
        lo, hi = self.core
        return lo - CARRIER_TOL <= x <= hi + CARRIER_TOL

    def in_carrier(self, x: float) -> bool:
        if not math.isfinite(x):
            return False
        if self.in_core(x):
            return True
        return x >= self.evens_from and x == int(x) and int(x) % 2 == 0

    def _d(self, x: float, y: float) -> float:
        if x == y:
            return 0.0
        if self.in_core(x) and self.in_core(y):
            return abs(x - y)
        return max(x, y)

    def pairwise(self, xs, ys) -> np.ndarray:
        xs, ys = np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)
        lo, hi = self.core
        cx = (xs >= lo - CARRIER_TOL) & (xs <= hi + CARRIER_TOL)
        cy = (ys >= lo - CARRIER_TOL) & (ys <= hi + CARRIER_TOL)
        both = np.logical_and.outer(cx, cy)
        d = np.where(both, np.abs(np.subtract.outer(xs, ys)), np.maximum.outer(xs, ys))
        return np.where(np.equal.outer(xs, ys), 0.0, d)

    def check_set(self, s: CompactSet) -> None:
        super().check_set(s)
        if isinstance(s, Interval) and not (self.in_core(s.lo) and self.in_core(s.hi)):
            raise DomainError(f"interval {s} must lie inside the core {list(self.core)}")

    def describe(self) -> dict:
        return {"kind": self.kind, "core": list(self.core), "evens_from": self.evens_from}


class TableMetric(MetricRule):
    """Metric given by a symmetric matrix over an enumerated carrier."""

    kind = "custom-table"

    def __init__(self, carrier: Sequence[float], matrix) -> None:
        self.carrier = tuple(float(p) for p in carrier)
        self.matrix = np.asarray(matrix, dtype=float)
        n = len(self.carrier)
        if self.matrix.shape != (n, n):
            raise ValueError(f"matrix shape {self.matrix.shape} does not match carrier size {n}")
        if len(set(self.carrier)) != n:
            raise ValueError("carrier points must be distinct")
        if not np.array_equal(self.matrix, self.matrix.T):
            raise ValueError("distance matrix must be symmetric")
        if np.any(self.matrix < 0) or not np.all(np.isfinite(self.matrix)):
            raise ValueError("distance matrix must be finite and nonnegative")
        self._index = {p: i for i, p in enumerate(self.carrier)}

    def in_carrier(self, x: float) -> bool:
        return float(x) in self._index

    def _d(self, x: float, y: float) -> float:
        return float(self.matrix[self._index[float(x)], self._index[float(y)]])

    def pairwise(self, xs, ys) -> np.ndarray:
        i = [self._index[float(x)] for x in xs]
        j = [self._index[float(y)] for y in ys]
        return self.matrix[np.ix_(i, j)]

    def check_set(self, s: CompactSet) -> None:
        if isinstance(s, Interval) and s.lo != s.hi:
            raise DomainError("a finite carrier only supports finite point sets")
        super().check_set(s)

    def describe(self) -> dict:
        return {"kind": self.kind, "carrier": list(self.carrier), "matrix": self.matrix.tolist()}


def check_metric_axioms(rule: MetricRule, sample: Iterable[float], tol: float = 0.0) -> list[str]:
    """Return the list of violated metric axioms on all pairs/triples of ``sample``."""
    pts = list(sample)
    problems = []
    for x in pts:
        for y in pts:
            dxy = dist(rule, x, y)
            if dxy < 0:
                problems.append(f"negative d({x}, {y})")
            if (dxy == 0) != (x == y):
                problems.append(f"identity of indiscernibles fails at ({x}, {y})")
            if abs(dxy - dist(rule, y, x)) > tol:
                problems.append(f"asymmetric at ({x}, {y})")
            for z in pts:
                if dist(rule, x, z) > dxy + dist(rule, y, z) + tol:
                    problems.append(f"triangle inequality fails at ({x}, {y}, {z})")
    return problems


# }}}


# {{{ distances


def dist(rule: MetricRule, x: float, y: float) -> float:
    rule.check_point(x)
    rule.check_point(y)
    return rule._d(float(x), float(y))


def _interval_candidates(rule: MetricRule, A: Interval, B: CompactSet) -> list[float]:
    # d(., B) restricted to A is a minimum of V-shapes |a - b| and constants, so
    # its maximum sits at an endpoint of A, a midpoint between neighbouring
    # V-shapes, or where a V-shape crosses one of the constants.
    cands = [A.lo, A.hi]
    if isinstance(B, Interval):
        cands += [B.lo, B.hi]
        inner, consts = [B.lo, B.hi], []
    else:
        if isinstance(rule, MaxOutsideMetric):
            inner = [b for b in B.points if rule.in_core(b)]
            consts = [b for b in B.points if not rule.in_core(b)]
        else:
            inner, consts = list(B.points), []
        cands += inner
        cands += [(p + q) / 2 for p, q in zip(inner[:-1], inner[1:])]
        for c in consts[:1]:
            cands += [b + c for b in inner] + [b - c for b in inner]
    return [A.clamp(c) for c in cands]


def dist_to_set(rule: MetricRule, x: float, B: CompactSet) -> float:
    """Infimum of ``dist(x, b)`` over ``b`` in ``B``."""
    rule.check_point(x)
    rule.check_set(B)
    return _dist_to_set(rule, float(x), B)


def _dist_to_set(rule: MetricRule, x: float, B: CompactSet) -> float:
    if isinstance(B, FinitePoints):
        if len(B.points) > 8:
            return float(rule.pairwise((x,), B.points).min())
        return min(rule._d(x, b) for b in B.points)
    if isinstance(rule, AbsoluteDifference):
        return abs(x - B.clamp(x))
    if isinstance(rule, MaxOutsideMetric):
        if rule.in_core(x):
            return abs(x - B.clamp(x))
        return max(x, B.lo)
    if B.lo == B.hi:
        return rule._d(x, B.lo)
    raise DomainError(f"intervals are not supported under {rule.kind}")


def nearest_point(rule: MetricRule, x: float, B: CompactSet) -> float:
    """A point of ``B`` realizing ``dist_to_set``; ties go to the smallest value."""
    rule.check_point(x)
    rule.check_set(B)
    x = float(x)
    if isinstance(B, FinitePoints):
        best, best_d = B.points[0], rule._d(x, B.points[0])
        for b in B.points[1:]:
            d = rule._d(x, b)
            if d < best_d:
                best, best_d = b, d
        return best
    if isinstance(rule, MaxOutsideMetric) and not rule.in_core(x):
        return B.lo
    if isinstance(rule, (AbsoluteDifference, MaxOutsideMetric)):
        return B.clamp(x)
    if B.lo == B.hi:
        return B.lo
    raise DomainError(f"intervals are not supported under {rule.kind}")


def _grid_sup(f: Callable[[float], float], lo: float, hi: float, nodes: int = 10_000) -> float:
    ts = np.linspace(lo, hi, nodes)
    vals = np.array([f(t) for t in ts])
    i = int(np.argmax(vals))
    # one refinement pass around the best node
    a, b = ts[max(i - 1, 0)], ts[min(i + 1, nodes - 1)]
    fine = np.linspace(a, b, nodes)
    return max(float(vals.max()), max(f(t) for t in fine))


def excess(rule: MetricRule, A: CompactSet, B: CompactSet, method: str = "exact") -> float:
    """Directed excess ``sup_{a in A} d(a, B)``.

    ``method="grid"`` evaluates interval suprema on a refined uniform grid
    instead of the exact candidate analysis; it exists as a cross-check.
    """
    rule.check_set(A)
    rule.check_set(B)
    return _excess(rule, A, B, method)


def _excess(rule: MetricRule, A: CompactSet, B: CompactSet, method: str = "exact") -> float:
    if isinstance(A, FinitePoints) and isinstance(B, FinitePoints):
        return float(rule.pairwise(A.points, B.points).min(axis=1).max())
    if isinstance(A, FinitePoints):
        return max(_dist_to_set(rule, a, B) for a in A.points)
    if A.lo == A.hi:
        return _dist_to_set(rule, A.lo, B)
    if method == "grid":
        return _grid_sup(lambda a: _dist_to_set(rule, a, B), A.lo, A.hi)
    if method != "exact":
        raise ValueError(f"unknown method {method!r}")
    return max(_dist_to_set(rule, a, B) for a in _interval_candidates(rule, A, B))


def hausdorff(rule: MetricRule, A: CompactSet, B: CompactSet, method: str = "exact") -> float:
    """Pompeiu-Hausdorff distance: the larger of the two directed excesses."""
    rule.check_set(A)
    rule.check_set(B)
    return _hausdorff(rule, A, B, method)


def _hausdorff(rule: MetricRule, A: CompactSet, B: CompactSet, method: str = "exact") -> float:
    if A == B:
        return 0.0
    e1 = _excess(rule, A, B, method)
    e2 = _excess(rule, B, A, method)
    if math.isinf(e1) or math.isinf(e2):
        return INFINITY
    return max(e1, e2)


def h_relaxed_select(rule: MetricRule, a: float, A: CompactSet, B: CompactSet, h: float) -> float:
    """Pick ``b`` in ``B`` with ``d(a, b) < h * H(A, B)``.

    The nearest point always qualifies because ``d(a, B) <= H(A, B) < h H(A, B)``.
    """
    if not h > 1:
        raise PreconditionError(f"h must exceed 1, got {h}")
    H = hausdorff(rule, A, B)
    if H == 0:
        raise PreconditionError("h-relaxed selection needs H(A, B) > 0")
    if dist_to_set(rule, a, A) > 0:
        raise PreconditionError(f"{a} is not a member of {A}")
    b = nearest_point(rule, a, B)
    assert rule._d(a, b) < h * H
    return b


# }}}


# {{{ multivalued maps


@dataclass(frozen=True)
class MultiMap:
    """A set-valued map on the carrier of ``metric``."""

    metric: MetricRule
    rule: Callable[[float], CompactSet]
    name: str = "map"
    compact_valued: bool = True
    closed_bounded: bool = True

    def __call__(self, x: float) -> CompactSet:
        self.metric.check_point(x)
        image = self.rule(float(x))
        self.metric.check_set(image)
        return image


def evens_ladder_map(metric: MaxOutsideMetric | None = None, zero_image: float = 8 / 9) -> MultiMap:
    """``0 -> {zero_image}``, core points ``-> [0, 1]``, even ``x -> {0, 2, ..., x - 2}``."""
    metric = metric or MaxOutsideMetric()

    def rule(x: float) -> CompactSet:
        if x == 0:
            return FinitePoints((zero_image,))
        if metric.in_core(x):
            return Interval(0.0, 1.0)
        return FinitePoints(tuple(float(v) for v in range(0, int(x) - 1, 2)))

    return MultiMap(metric, rule, name="evens-ladder")


def interval_affine_map(
    metric: MetricRule, lo: tuple[float, float], hi: tuple[float, float]
) -> MultiMap:
    """``x -> [lo[0] x + lo[1], hi[0] x + hi[1]]``."""

    def rule(x: float) -> CompactSet:
        return Interval(lo[0] * x + lo[1], hi[0] * x + hi[1])

    return MultiMap(metric, rule, name="interval-affine")


def singleton_affine_map(metric: MetricRule, slope: float, offset: float = 0.0) -> MultiMap:
    return MultiMap(metric, lambda x: FinitePoints((slope * x + offset,)), name="singleton-affine")


def finite_table_map(metric: MetricRule, table: dict[float, Iterable[float]]) -> MultiMap:
    images = {float(k): FinitePoints(tuple(v)) for k, v in table.items()}

    def rule(x: float) -> CompactSet:
        try:
            return images[x]
        except KeyError:
            raise DomainError(f"finite table has no entry for {x}") from None

    return MultiMap(metric, rule, name="finite-table")


# }}}
