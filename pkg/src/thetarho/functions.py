"""Gauge functions theta and five-argument combiners rho, with sampling-based axiom checks.

theta maps ``(0, inf)`` into ``(1, inf)``. Builtins are evaluated through
``log_eval`` (``ln theta``) because ``exp(sqrt(t e^t))`` overflows doubles long
before the distances met in practice stop being interesting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .metric import INFINITY, DomainError, PreconditionError


def aitken_limit(values: Sequence[float]) -> float:
    """Aitken delta-squared estimate from the last three values of a sequence."""
    if len(values) < 3:
        return float(values[-1])
    a, b, c = (float(v) for v in values[-3:])
    denom = (c - b) - (b - a)
    if denom == 0 or not math.isfinite(denom):
        return c
    est = c - (c - b) ** 2 / denom
    # Aitken is unreliable once the differences hit round-off; fall back to the last value
    if abs(est - c) > abs(c - a) + abs(c - b):
        return c
    return est


# {{{ theta


THETA_KINDS = ("exp-sqrt", "exp-sqrt-texp", "exp-sqrt-shift", "log-shift", "custom")


@dataclass(frozen=True)
class ThetaSpec:
    kind: str
    a: float = 2.0
    """Offset of ``log-shift``; must exceed 1."""
    fn: Callable[[float], float] | None = field(default=None, compare=False)
    claimed_right_continuous: bool = True
    claimed_omega_member: bool = True

    def __post_init__(self) -> None:
        if self.kind not in THETA_KINDS:
            raise ValueError(f"unknown theta {self.kind!r}; expected one of {THETA_KINDS}")
        if self.kind == "log-shift" and not self.a > 1:
            raise ValueError(f"log-shift needs a > 1, got {self.a}")
        if self.kind == "custom" and self.fn is None:
            raise ValueError("custom theta needs a callable")

    @property
    def name(self) -> str:
        return f"log-shift(a={self.a:g})" if self.kind == "log-shift" else self.kind

    def log_eval(self, t: float) -> float:
        """``ln theta(t)``."""
        if not t > 0:
            raise DomainError(f"theta is defined on (0, inf), got {t}")
        if self.kind == "exp-sqrt":
            return math.sqrt(t)
        if self.kind == "exp-sqrt-texp":
            if t > 1400:
                return INFINITY
            return math.exp(0.5 * (math.log(t) + t))
        if self.kind == "exp-sqrt-shift":
            return math.sqrt(t + 1)
        if self.kind == "log-shift":
            return math.log(self.a + 0.5 * math.log1p(t))
        return math.log(self.fn(t))

    def __call__(self, t: float) -> float:
        lv = self.log_eval(t)
        return INFINITY if lv > 709 else math.exp(lv)

    def minus_one(self, t: float) -> float:
        """``theta(t) - 1`` without cancellation for small ``t``."""
        lv = self.log_eval(t)
        return INFINITY if lv > 709 else math.expm1(lv)


def theta_eval(theta: ThetaSpec, t: float) -> float:
    return theta(t)


def sampled_theta(ts: Sequence[float], values: Sequence[float], **flags) -> ThetaSpec:
    """theta from a value table, linearly interpolated (monotone data stays monotone)."""
    ts = np.asarray(ts, dtype=float)
    vs = np.asarray(values, dtype=float)
    if ts.ndim != 1 or ts.shape != vs.shape or np.any(np.diff(ts) <= 0):
        raise ValueError("table needs strictly increasing nodes with matching values")
    flags.setdefault("claimed_right_continuous", False)
    return ThetaSpec("custom", fn=lambda t: float(np.interp(t, ts, vs)), **flags)


def builtin_theta(name: str, a: float = 2.0) -> ThetaSpec:
    if name == "custom":
        raise ValueError("custom theta cannot be built by name")
    return ThetaSpec(name, a=a)


BUILTIN_THETAS = (
    ThetaSpec("exp-sqrt"),
    ThetaSpec("exp-sqrt-texp"),
    ThetaSpec("exp-sqrt-shift"),
    ThetaSpec("log-shift", a=2.0),
)


def log_grid(lo: float = 1e-6, hi: float = 1e3, n: int = 400) -> np.ndarray:
    return np.geomspace(lo, hi, n)


def check_theta1(theta: ThetaSpec, grid: Sequence[float]) -> bool:
    """Non-decreasing across a strictly increasing positive grid."""
    grid = np.asarray(grid, dtype=float)
    if np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise PreconditionError("grid must be positive and strictly increasing")
    vals = [theta.log_eval(t) for t in grid]
    return all(b >= a for a, b in zip(vals[:-1], vals[1:]))


def check_theta2(theta: ThetaSpec, seq, tol: float = 1e-6) -> bool:
    """Whether ``theta(t_n) -> 1`` along a positive null sequence.

    ``seq`` is either a callable ``n -> t_n`` (probed at ``n = 10^4 .. 10^12``)
    or a finite array whose tail is used. The limit is estimated by Aitken
    extrapolation over three tail values.
    """
    if callable(seq):
        ts = [float(seq(10**j)) for j in range(4, 13)]
    else:
        ts = [float(t) for t in seq]
        if len(ts) >= 3:
            # pick a roughly geometric tail triple so Aitken sees a clean rate
            n = len(ts)
            ts = [ts[max(n // 100 - 1, 0)], ts[max(n // 10 - 1, 0)], ts[-1]]
    if any(t <= 0 for t in ts):
        raise PreconditionError("sequence must be positive")
    vals = [theta.minus_one(t) for t in ts]
    return abs(aitken_limit(vals)) <= tol


@dataclass
class Theta3Estimate:
    r: float
    lam: float
    """Estimated limit of ``(theta(t) - 1) / t^r``; ``INFINITY`` when it diverges."""
    passed: bool
    grid: list[float]
    ratios: list[float]


def check_theta3(
    theta: ThetaSpec,
    r: float,
    grid: Sequence[float] | None = None,
    ceiling: float = 1e12,
    slope_tol: float = 1e-3,
) -> Theta3Estimate:
    """Estimate ``lim_{t -> 0+} (theta(t) - 1) / t^r`` on a geometric grid toward 0.

    Divergence is declared when the ratio exceeds ``ceiling`` while increasing,
    or when the log-log slope of the ratio settles at a negative value
    (power-law growth). A settled positive slope means the ratio tends to 0.
    """
    if not 0 < r < 1:
        raise DomainError(f"r must lie in (0, 1), got {r}")
    if grid is None:
        grid = np.geomspace(1e-2, 1e-12, 11)
    grid = [float(t) for t in grid]
    ratios = [theta.minus_one(t) / t**r for t in grid]
    growing = all(b > a for a, b in zip(ratios[:-1], ratios[1:]))
    if ratios[-1] > ceiling and growing:
        return Theta3Estimate(r, INFINITY, True, grid, ratios)
    slopes = [
        (math.log(ratios[i + 1]) - math.log(ratios[i])) / (math.log(grid[i + 1]) - math.log(grid[i]))
        if ratios[i] > 0 and ratios[i + 1] > 0
        else math.nan
        for i in range(len(grid) - 1)
    ]
    last = slopes[-2:]
    settled = all(math.isfinite(s) for s in last) and abs(last[1] - last[0]) <= 0.1 * abs(last[1]) + 1e-12
    if settled and abs(last[1]) > slope_tol:
        if last[1] < 0:
            return Theta3Estimate(r, INFINITY, True, grid, ratios)
        return Theta3Estimate(r, 0.0, False, grid, ratios)
    lam = aitken_limit(ratios)
    return Theta3Estimate(r, lam, lam > slope_tol, grid, ratios)


@dataclass
class ThetaPropertyReport:
    theta: str
    theta1_pass: bool
    theta2_pass: bool
    theta3: Theta3Estimate
    grid1: list[float]


def theta_report(theta: ThetaSpec, r: float = 0.5) -> ThetaPropertyReport:
    grid = log_grid()
    return ThetaPropertyReport(
        theta=theta.name,
        theta1_pass=check_theta1(theta, grid),
        theta2_pass=check_theta2(theta, lambda n: 1.0 / n),
        theta3=check_theta3(theta, r),
        grid1=[float(g) for g in grid],
    )


# }}}


# {{{ rho

RHO_KINDS = (
    "nadler",
    "kannan",
    "chatterjea",
    "reich",
    "berinde",
    "hardy-rogers",
    "ciric-1",
    "ciric-2",
    "zamfirescu",
    "custom-coefficients",
)

_DEFAULT_COEFFS = {
    "reich": (1 / 3, 1 / 3, 1 / 3),
    "berinde": (0.5, 0.25),
    "hardy-rogers": (0.2, 0.2, 0.2, 0.2, 0.1),
    "custom-coefficients": (1.0, 0.0, 0.0, 0.0, 0.0),
}


@dataclass(frozen=True)
class RhoSpec:
    kind: str
    coeffs: tuple[float, ...] = ()
    """reich: (alpha, beta, gamma); berinde: (alpha, L); hardy-rogers and
    custom-coefficients: one weight per argument."""

    def __post_init__(self) -> None:
        if self.kind not in RHO_KINDS:
            raise ValueError(f"unknown rho {self.kind!r}; expected one of {RHO_KINDS}")
        coeffs = tuple(float(c) for c in (self.coeffs or _DEFAULT_COEFFS.get(self.kind, ())))
        expected = len(_DEFAULT_COEFFS.get(self.kind, ()))
        if len(coeffs) != expected:
            raise ValueError(f"{self.kind} takes {expected} coefficients, got {len(coeffs)}")
        if any(c < 0 for c in coeffs):
            raise ValueError("rho coefficients must be nonnegative")
        if self.kind == "reich" and sum(coeffs) > 1 + 1e-15:
            raise ValueError("reich needs alpha + beta + gamma <= 1")
        if self.kind == "hardy-rogers" and sum(coeffs[:3]) + 2 * coeffs[3] > 1 + 1e-15:
            raise ValueError("hardy-rogers needs alpha + beta + gamma + 2 delta <= 1")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def name(self) -> str:
        if self.coeffs:
            return f"{self.kind}({', '.join(format(c, 'g') for c in self.coeffs)})"
        return self.kind

    def __call__(self, v: Sequence[float]) -> float:
        return rho_eval(self, v)


def rho_eval(rho: RhoSpec, v: Sequence[float]) -> float:
    if len(v) != 5:
        raise ValueError(f"rho takes five arguments, got {len(v)}")
    if any(x < 0 for x in v):
        raise DomainError(f"rho arguments must be nonnegative, got {tuple(v)}")
    x1, x2, x3, x4, x5 = (float(x) for x in v)
    c = rho.coeffs
    k = rho.kind
    if k == "nadler":
        return x1
    if k == "kannan":
        return x2 + x3
    if k == "chatterjea":
        return x4 + x5
    if k == "reich":
        return c[0] * x1 + c[1] * x2 + c[2] * x3
    if k == "berinde":
        return c[0] * x1 + c[1] * x5
    if k in ("hardy-rogers", "custom-coefficients"):
        return c[0] * x1 + c[1] * x2 + c[2] * x3 + c[3] * x4 + c[4] * x5
    if k == "ciric-1":
        return max(x1, x2, x3, (x4 + x5) / 2)
    if k == "ciric-2":
        return max(x1, x2, x3, x4, x5)
    return max(x1, (x2 + x3) / 2, (x4 + x5) / 2)


def builtin_rho(name: str, coeffs: Sequence[float] = ()) -> RhoSpec:
    return RhoSpec(name, tuple(coeffs))


BUILTIN_RHOS = tuple(
    RhoSpec(k) for k in RHO_KINDS if k != "custom-coefficients"
)

RHO1_POINTS = ((1, 1, 1, 2, 0), (1, 1, 1, 0, 2), (1, 1, 1, 1, 1))


@dataclass
class RhoAxiomReport:
    rho: str
    rho1_pass: bool
    rho1_values: list[float]
    rho2_pass: bool
    rho3_pass: bool
    rho3_strict_pass: bool
    samples: int
    rho3_shifted_pass: bool = True
    """Strict growth with the fourth slot pinned to 0 and the fifth varying; informational only."""
    witnesses: dict[str, list] = field(default_factory=dict)

    @property
    def all_pass(self) -> bool:
        return self.rho1_pass and self.rho2_pass and self.rho3_pass and self.rho3_strict_pass


def check_rho_axioms(rho: RhoSpec, samples: int = 2000, seed: int = 0) -> RhoAxiomReport:
    """Falsification checks for normalization, sub-homogeneity and monotonicity.

    The strict clause is strict growth in the first four arguments with the
    fifth pinned to 0. The shifted reading (fourth slot pinned to 0, the fifth
    carrying the fourth coordinate) is reported separately and does not enter
    ``all_pass``.
    """
    rng = np.random.default_rng(seed)
    values = [rho_eval(rho, p) for p in RHO1_POINTS]
    rho1 = all(0 < v <= 1 for v in values)
    witnesses: dict[str, list] = {}
    if not rho1:
        witnesses["rho1"] = [list(p) for p, v in zip(RHO1_POINTS, values) if not 0 < v <= 1]

    rho2 = True
    for _ in range(samples):
        v = rng.uniform(0, 10, 5)
        a = rng.uniform(0, 10)
        lhs, rhs = rho_eval(rho, a * v), a * rho_eval(rho, v)
        if lhs > rhs * (1 + 1e-12) + 1e-12:
            rho2 = False
            witnesses.setdefault("rho2", []).append([v.tolist(), a])
            break

    rho3 = True
    strict = shifted = True
    for _ in range(samples):
        x = rng.uniform(0, 10, 5)
        y = x + rng.uniform(0, 5, 5)
        if rho_eval(rho, x) > rho_eval(rho, y):
            rho3 = False
            witnesses.setdefault("rho3", []).append([x.tolist(), y.tolist()])
            break
    for _ in range(samples):
        x = rng.uniform(0, 10, 4)
        y = x + rng.uniform(1e-3, 5, 4)
        if strict and not rho_eval(rho, (*x, 0.0)) < rho_eval(rho, (*y, 0.0)):
            strict = False
            witnesses["rho3-strict"] = [x.tolist(), y.tolist()]
        if shifted and not rho_eval(rho, (*x[:3], 0.0, x[3])) < rho_eval(rho, (*y[:3], 0.0, y[3])):
            shifted = False
            witnesses["rho3-shifted"] = [x.tolist(), y.tolist()]
        if not (strict or shifted):
            break
    return RhoAxiomReport(rho.name, rho1, values, rho2, rho3, strict, samples, shifted, witnesses)


def lemma_rho_bound(rho: RhoSpec, u: float, v: float) -> float:
    """The maximum of the four rho evaluations in the hypothesis of the ``u < v`` lemma."""
    return max(
        rho_eval(rho, (v, v, u, v + u, 0.0)),
        rho_eval(rho, (v, v, u, 0.0, v + u)),
        rho_eval(rho, (v, u, v, v + u, 0.0)),
        rho_eval(rho, (v, u, v, 0.0, v + u)),
    )


def lemma_l2_property(rho: RhoSpec, u: float, v: float) -> tuple[bool, bool]:
    """``(hypothesis_holds, conclusion_holds)`` for the ``u < v`` lemma."""
    return u < lemma_rho_bound(rho, u, v), u < v


def lemma_l1_property(theta: ThetaSpec, seq: Sequence[float], tol: float = 1e-6) -> tuple[bool, bool]:
    """``(theta-limit is 1, sequence limit is 0)`` for a decreasing positive sequence.

    Both limits are Aitken estimates over the tail, compared at ``tol``.
    """
    seq = [float(t) for t in seq]
    if any(t <= 0 for t in seq) or any(b > a for a, b in zip(seq[:-1], seq[1:])):
        raise PreconditionError("sequence must be positive and decreasing")
    theta_lim = aitken_limit([theta.minus_one(t) for t in seq])
    t_lim = aitken_limit(seq)
    return abs(theta_lim) <= tol, abs(t_lim) <= tol


def texp_criterion(H: float, u: float) -> float:
    """``(H / u) e^{H - u}``; for exp-sqrt-texp, ``theta(H) <= theta(u)^k`` iff this is ``<= k^2``."""
    return H / u * math.exp(H - u)


# }}}
