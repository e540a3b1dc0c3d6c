"""Checking the theta-rho contraction inequality for a multivalued map over sampled pairs."""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .functions import RhoSpec, ThetaSpec, rho_eval
from .metric import (
    AbsoluteDifference,
    MaxOutsideMetric,
    MetricRule,
    MultiMap,
    PreconditionError,
    TableMetric,
    _dist_to_set,
    _hausdorff,
    dist,
    hausdorff,
)

THETA_ONE_GUARD = 1e-15

NADLER = RhoSpec("nadler")


@dataclass(frozen=True)
class ContractionSpec:
    theta: ThetaSpec
    rho: RhoSpec
    k: float

    def __post_init__(self) -> None:
        if not 0 < self.k < 1:
            raise ValueError(f"k must lie in (0, 1), got {self.k}")

    def describe(self) -> dict:
        return {"theta": self.theta.name, "rho": self.rho.name, "k": self.k}


@dataclass
class PairEvidence:
    x: float
    y: float
    H: float
    rho_args: tuple[float, float, float, float, float]
    """``(d(x,y), d(x,Tx), d(y,Ty), d(x,Ty), d(y,Tx))``."""
    rho_value: float
    log_lhs: float
    """``ln theta(H)``."""
    log_rhs: float
    """``k ln theta(rho_value)``; ``-inf`` when theta is undefined at ``rho_value = 0``."""
    satisfied: bool
    kmin_pair: float | None

    @property
    def margin(self) -> float:
        """``ln lhs - ln rhs``; nonpositive exactly when the pair is satisfied."""
        return self.log_lhs - self.log_rhs

    @property
    def infeasible(self) -> bool:
        return self.kmin_pair is None

    def as_dict(self) -> dict:
        return {
            "x": self.x,
            "y": self.y,
            "H": self.H,
            "rho_args": list(self.rho_args),
            "rho_value": self.rho_value,
            "log_lhs": self.log_lhs,
            "log_rhs": _finite_or_str(self.log_rhs),
            "margin": _finite_or_str(self.margin),
            "satisfied": self.satisfied,
            "kmin_pair": self.kmin_pair,
        }


def _finite_or_str(v: float):
    return v if math.isfinite(v) else str(v)


def five_distances(metric: MetricRule, T, x: float, y: float):
    """Images and ``(d(x,y), d(x,Tx), d(y,Ty), d(x,Ty), d(y,Tx))``; images are validated by ``T``."""
    Tx, Ty = T(x), T(y)
    args = (
        dist(metric, x, y),
        _dist_to_set(metric, x, Tx),
        _dist_to_set(metric, y, Ty),
        _dist_to_set(metric, x, Ty),
        _dist_to_set(metric, y, Tx),
    )
    return Tx, Ty, args


def cached_map(T: MultiMap):
    """``T`` with validated images memoized; images of the builtin maps are immutable."""
    return functools.lru_cache(maxsize=None)(T)


def pair_check(metric: MetricRule, T: MultiMap, spec: ContractionSpec, x: float, y: float) -> PairEvidence:
    """Evidence for one pair. Raises when ``H(Tx, Ty) = 0``; such pairs are outside the condition."""
    Tx, Ty, args = five_distances(metric, T, x, y)
    H = hausdorff(metric, Tx, Ty)
    if H == 0:
        raise PreconditionError(f"H(Tx, Ty) = 0 at ({x}, {y}); the pair is excluded")
    return _evidence(spec, x, y, H, args)


def _evidence(spec: ContractionSpec, x: float, y: float, H: float, args) -> PairEvidence:
    rv = rho_eval(spec.rho, args)
    log_lhs = spec.theta.log_eval(H)
    if rv == 0:
        return PairEvidence(x, y, H, args, rv, log_lhs, -math.inf, False, None)
    log_theta_rho = spec.theta.log_eval(rv)
    log_rhs = spec.k * log_theta_rho
    if log_theta_rho < THETA_ONE_GUARD:
        return PairEvidence(x, y, H, args, rv, log_lhs, log_rhs, False, None)
    kmin = log_lhs / log_theta_rho
    if math.isnan(kmin):
        kmin = None
    return PairEvidence(x, y, H, args, rv, log_lhs, log_rhs, log_lhs <= log_rhs, kmin)


@dataclass
class CertReport:
    spec: dict
    domain: dict
    pair_count: int
    evidence: list[PairEvidence]
    violations: list[PairEvidence]
    kmin: float | None
    verdict: str
    flags: list[str] = field(default_factory=list)

    def as_dict(self, include_evidence: bool = False) -> dict:
        out = {
            "spec": self.spec,
            "domain": self.domain,
            "pair_count": self.pair_count,
            "verdict": self.verdict,
            "kmin": self.kmin,
            "violation_count": len(self.violations),
            "violations": [v.as_dict() for v in self.violations],
            "flags": list(self.flags),
        }
        if include_evidence:
            out["evidence"] = [e.as_dict() for e in self.evidence]
        return out


def ordered_pairs(xs: Iterable[float]) -> list[tuple[float, float]]:
    xs = sorted(set(float(x) for x in xs))
    return [(x, y) for x in xs for y in xs if x != y]


def _eligible_evidence(metric: MetricRule, T: MultiMap, spec: ContractionSpec, pairs) -> list[PairEvidence]:
    T = cached_map(T)
    out = []
    for x, y in sorted(set((float(a), float(b)) for a, b in pairs)):
        H = _hausdorff(metric, T(x), T(y))
        if H > 0:
            _, _, args = five_distances(metric, T, x, y)
            out.append(_evidence(spec, x, y, H, args))
    return out


def certify(
    metric: MetricRule,
    T: MultiMap,
    spec: ContractionSpec,
    pairs: Sequence[tuple[float, float]],
    domain: dict | None = None,
) -> CertReport:
    """Evaluate ``pair_check`` over every pair with ``H > 0`` and aggregate.

    Pairs are sorted before evaluation so the report is independent of input order.
    """
    if len(pairs) == 0:
        raise PreconditionError("pair domain is empty")
    evidence = _eligible_evidence(metric, T, spec, pairs)
    violations = [e for e in evidence if not e.satisfied]
    feasible = [e.kmin_pair for e in evidence if e.kmin_pair is not None]
    kmin = max(feasible) if feasible else None
    flags = []
    if not evidence:
        flags.append("no eligible pairs: every sampled pair has H(Tx, Ty) = 0")
    if any(e.infeasible for e in evidence):
        verdict = "infeasible"
    elif violations:
        verdict = "violated"
    else:
        verdict = "certified-on-sample"
    return CertReport(
        spec=spec.describe(),
        domain=domain or {"pairs": len(pairs)},
        pair_count=len(evidence),
        evidence=evidence,
        violations=violations,
        kmin=kmin,
        verdict=verdict,
        flags=flags,
    )


def remark_consequence_check(
    metric: MetricRule, T: MultiMap, rho: RhoSpec, pairs: Sequence[tuple[float, float]]
) -> list[bool]:
    """``H(Tx, Ty) <= rho(five distances)`` for each pair; the theta-free consequence of the contraction."""
    out = []
    for x, y in pairs:
        Tx, Ty, args = five_distances(metric, T, x, y)
        out.append(hausdorff(metric, Tx, Ty) <= rho_eval(rho, args))
    return out


def weak_theta_check(
    metric: MetricRule, T: MultiMap, theta: ThetaSpec, k: float, pairs: Sequence[tuple[float, float]]
) -> CertReport:
    """``theta(H(Tx, Ty)) <= theta(d(x, y))^k``: the contraction with rho pinned to ``x1``."""
    return certify(metric, T, ContractionSpec(theta, NADLER, k), pairs)


@dataclass
class RatioPoint:
    x: float
    H: float
    u: float
    ratio: float


def nonlinear_ratio_limit(
    metric: MetricRule, T: MultiMap, combiner: RhoSpec, xs: Sequence[float], base: float = 0.0
) -> list[RatioPoint]:
    """Trace of ``H(Tx, T base) / combiner(five distances)`` along an increasing sequence."""
    xs = [float(x) for x in xs]
    if any(b <= a for a, b in zip(xs[:-1], xs[1:])):
        raise PreconditionError("sample sequence must be increasing")
    out = []
    Tb = T(base)
    for x in xs:
        Tx = T(x)
        H = hausdorff(metric, Tx, Tb)
        if H == 0:
            continue
        _, _, args = five_distances(metric, T, x, base)
        u = rho_eval(combiner, args)
        out.append(RatioPoint(x, H, u, H / u if u > 0 else math.inf))
    return out


def sample_domain(metric: MetricRule, spec: dict | None = None, seed: int = 0) -> list[float]:
    """Stratified sample of the carrier.

    * max-outside: ``grid`` uniform core nodes plus even integers up to ``evens_ceiling``;
    * absolute-difference on ``[lo, hi]``: ``grid`` uniform nodes plus ``random`` seeded draws;
    * custom-table: the whole carrier.

    ``spec["points"]`` overrides everything with an explicit list.
    """
    spec = dict(spec or {})
    if "points" in spec:
        return sorted(set(float(p) for p in spec["points"]))
    rng = np.random.default_rng(seed)
    if isinstance(metric, MaxOutsideMetric):
        lo, hi = metric.core
        grid = np.linspace(lo, hi, int(spec.get("grid", 41)))
        ceiling = int(spec.get("evens_ceiling", 100))
        evens = range(metric.evens_from, ceiling + 1, 2)
        return sorted(set(float(g) for g in grid) | set(float(e) for e in evens))
    if isinstance(metric, AbsoluteDifference):
        lo, hi = metric.carrier if metric.carrier is not None else spec.get("range", (0.0, 1.0))
        pts = set(float(g) for g in np.linspace(lo, hi, int(spec.get("grid", 51))))
        pts |= set(float(v) for v in rng.uniform(lo, hi, int(spec.get("random", 0))))
        return sorted(pts)
    if isinstance(metric, TableMetric):
        return sorted(metric.carrier)
    raise ValueError(f"no sampler for metric {metric.kind}")
