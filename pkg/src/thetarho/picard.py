"""Picard-type iterations for set-valued maps and checks of their quantitative bounds."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable

from .functions import ThetaSpec
from .metric import (
    DomainError,
    MetricRule,
    MultiMap,
    PreconditionError,
    dist,
    dist_to_set,
    h_relaxed_select,
    nearest_point,
)


def default_h_schedule(n: int) -> float:
    # 1 + 2^-n rounds to 1 past n = 52; stay strictly above 1
    return max(1.0 + 2.0**-n, math.nextafter(1.0, 2.0))


@dataclass
class SolverConfig:
    tol: float = 1e-9
    max_iter: int = 1000
    h_schedule: Callable[[int], float] = default_h_schedule
    r: float = 0.5
    stagnation_window: int = 10

    def __post_init__(self) -> None:
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be positive")
        if not 0 < self.r < 1:
            raise ValueError("r must lie in (0, 1)")


@dataclass
class IterationTrace:
    points: list[float]
    sigma: list[float]
    """``sigma[n] = d(x_n, x_{n+1})``."""
    termination: str
    """``fixed-point-found``, ``max-iter`` or ``stagnation``."""
    residual: float
    """``d(x_N, T x_N)`` at the last point."""
    h: list[float] = field(default_factory=list)

    @property
    def steps(self) -> int:
        return len(self.sigma)

    @property
    def last(self) -> float:
        return self.points[-1]

    def theta_sigma(self, theta: ThetaSpec) -> list[float]:
        return [theta(s) for s in self.sigma]

    def bound(self, theta: ThetaSpec, k: float) -> list[float]:
        """``theta(sigma_0)^(k^n)`` per recorded step."""
        if not self.sigma:
            return []
        l0 = theta.log_eval(self.sigma[0])
        return [math.exp(l0 * k**n) for n in range(len(self.sigma))]


def _iterate(metric: MetricRule, T: MultiMap, x0: float, cfg: SolverConfig, relaxed: bool) -> IterationTrace:
    x = float(x0)
    pts = [x]
    sigma: list[float] = []
    hs: list[float] = []
    prev_image = None
    non_decreasing = 0
    termination = "max-iter"
    for n in range(cfg.max_iter):
        Tx = T(x)
        if dist_to_set(metric, x, Tx) <= cfg.tol:
            termination = "fixed-point-found"
            break
        if relaxed and prev_image is not None:
            h = cfg.h_schedule(n)
            nxt = h_relaxed_select(metric, x, prev_image, Tx, h)
            hs.append(h)
        else:
            nxt = nearest_point(metric, x, Tx)
        s = dist(metric, x, nxt)
        if sigma and s >= sigma[-1]:
            non_decreasing += 1
        else:
            non_decreasing = 0
        sigma.append(s)
        pts.append(nxt)
        prev_image, x = Tx, nxt
        if non_decreasing >= cfg.stagnation_window:
            termination = "stagnation"
            break
    try:
        residual = dist_to_set(metric, x, T(x))
    except DomainError:
        residual = math.inf
    if termination == "max-iter" and residual <= cfg.tol:
        termination = "fixed-point-found"
    return IterationTrace(pts, sigma, termination, residual, hs)


def picard_compact(metric: MetricRule, T: MultiMap, x0: float, cfg: SolverConfig | None = None) -> IterationTrace:
    """``x_{n+1}`` = nearest point of ``T x_n`` to ``x_n``, stopping once ``d(x_n, T x_n) <= tol``."""
    return _iterate(metric, T, x0, cfg or SolverConfig(), relaxed=False)


def picard_cb(metric: MetricRule, T: MultiMap, x0: float, cfg: SolverConfig | None = None) -> IterationTrace:
    """Iteration with ``h_n``-relaxed selections ``d(x_n, x_{n+1}) < h_n H(T x_{n-1}, T x_n)``.

    The first step has no previous image and takes the nearest point.
    """
    return _iterate(metric, T, x0, cfg or SolverConfig(), relaxed=True)


@dataclass
class DecayReport:
    passed: bool
    first_failure: int | None
    reason: str | None


def verify_sigma_decay(trace: IterationTrace, theta: ThetaSpec, k: float) -> DecayReport:
    """Strict decrease of the steps and ``theta(sigma_n) <= theta(sigma_0)^(k^n)`` index by index."""
    s = trace.sigma
    if len(s) < 2:
        return DecayReport(True, None, None)
    l0 = theta.log_eval(s[0]) if s[0] > 0 else 0.0
    for n in range(len(s)):
        if n + 1 < len(s) and not s[n + 1] < s[n]:
            return DecayReport(False, n, f"sigma[{n + 1}] = {s[n + 1]!r} >= sigma[{n}] = {s[n]!r}")
        if s[n] > 0 and theta.log_eval(s[n]) > l0 * k**n:
            return DecayReport(False, n, f"theta(sigma[{n}]) exceeds theta(sigma_0)^(k^{n})")
    return DecayReport(True, None, None)


@dataclass
class TailBoundReport:
    r: float
    n1: int | None
    """Smallest index after which ``sigma_n <= n^(-1/r)`` at every recorded step; ``None`` if never."""
    checked: int


def tail_bound_check(trace: IterationTrace, r: float) -> TailBoundReport:
    if len(trace.sigma) < 5:
        raise PreconditionError("tail bound check needs at least 5 recorded steps")
    if not 0 < r < 1:
        raise DomainError(f"r must lie in (0, 1), got {r}")
    s = trace.sigma
    fails = [n for n in range(1, len(s)) if s[n] > n ** (-1.0 / r)]
    if not fails:
        return TailBoundReport(r, 0, len(s))
    if fails[-1] == len(s) - 1:
        return TailBoundReport(r, None, len(s))
    return TailBoundReport(r, fails[-1], len(s))


def cauchy_tail_estimate(r: float, n: int) -> float:
    """Upper bound for ``sum_{k >= n} k^(-1/r)`` by the integral from ``n - 1``."""
    if not 0 < r < 1:
        raise DomainError(f"the series diverges unless 0 < r < 1, got r = {r}")
    if n < 2:
        raise PreconditionError("n must be at least 2")
    p = 1.0 / r
    return (n - 1) ** (1.0 - p) / (p - 1.0)


def trace_to_csv(trace: IterationTrace, theta: ThetaSpec, k: float) -> str:
    """Columns ``n, x_n, sigma_n, theta_sigma_n, bound_n``; the final point has empty step columns."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "x_n", "sigma_n", "theta_sigma_n", "bound_n"])
    ts = trace.theta_sigma(theta)
    bs = trace.bound(theta, k)
    for n, x in enumerate(trace.points):
        if n < len(trace.sigma):
            w.writerow([n, repr(x), repr(trace.sigma[n]), repr(ts[n]), repr(bs[n])])
        else:
            w.writerow([n, repr(x), "", "", ""])
    return buf.getvalue()
