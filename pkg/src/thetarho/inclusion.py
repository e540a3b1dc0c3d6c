"""Existence constants, the integral operator and successive approximation for Caputo inclusions.

A solution satisfies ``x = Lambda(x, w)`` with a selection ``w(t)`` of
``F(t, x(t))``, where

    Lambda(x, w)(t) = I^beta w(t)
        + sum_k (t - alpha)^k / k! * (a_k + int_{t0}^{alpha} g_k(s, x(s)) ds - I^(beta-k) w(alpha)).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .fractional import GridFunction, gamma_fn, rl_integral, rl_integral_grid, trapezoid_to
from .metric import PreconditionError
from .problem import FdeProblem

VARIANTS = ("strict-d", "dropped-factorials")
DEFAULT_VARIANT = "dropped-factorials"
SELECTION_KINDS = ("proximal", "midpoint", "lower", "upper")


class DivergenceError(RuntimeError):
    def __init__(self, message: str, steps: list[float]) -> None:
        super().__init__(message)
        self.steps = steps


# {{{ constants


def gamma1(problem: FdeProblem, variant: str = DEFAULT_VARIANT) -> float:
    """Selection-term constant; ``strict-d`` keeps the ``1/k!`` factors, ``dropped-factorials`` omits them."""
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    b, n = problem.beta, problem.n
    total = 2.0 / gamma_fn(b + 1)
    for k in range(1, n):
        fact = math.factorial(k) if variant == "strict-d" else 1
        total += 1.0 / (fact * gamma_fn(b - k + 1))
    return total * (problem.T - problem.t0) ** b


def envelope_norm(expr, problem: FdeProblem) -> float:
    """Sup of ``|expr(t)|`` over the problem grid."""
    return float(np.max(np.abs(expr(problem.nodes))))


def gamma2(problem: FdeProblem) -> float:
    L = problem.T - problem.t0
    return sum(L**k * envelope_norm(pk, problem) / math.factorial(k) for k, pk in enumerate(problem.p))


@dataclass
class ConditionReport:
    variant: str
    gamma1: float
    gamma2: float
    m_norm: float
    p_norms: list[float]
    lhs: float
    tau: float
    bound: float
    """``exp(-tau)``."""
    satisfied: bool
    tau_max: float | None

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def condition_d_check(problem: FdeProblem, variant: str = DEFAULT_VARIANT, tau: float | None = None) -> ConditionReport:
    """``gamma1 ||m|| + gamma2 <= exp(-tau)``."""
    tau = problem.tau if tau is None else tau
    g1, g2 = gamma1(problem, variant), gamma2(problem)
    m_norm = envelope_norm(problem.m, problem)
    lhs = g1 * m_norm + g2
    return ConditionReport(
        variant=variant,
        gamma1=g1,
        gamma2=g2,
        m_norm=m_norm,
        p_norms=[envelope_norm(pk, problem) for pk in problem.p],
        lhs=lhs,
        tau=tau,
        bound=math.exp(-tau),
        satisfied=lhs <= math.exp(-tau),
        tau_max=-math.log(lhs) if 0 < lhs < 1 else (math.inf if lhs == 0 else None),
    )


def interval_hausdorff(lo1, hi1, lo2, hi2):
    """Hausdorff distance of ``[lo1, hi1]`` and ``[lo2, hi2]`` under ``|x - y|``."""
    return np.maximum(np.abs(np.subtract(lo1, lo2)), np.abs(np.subtract(hi1, hi2)))


@dataclass
class EnvelopeReport:
    passed: bool
    samples: int
    F_lipschitz_pass: bool
    F_origin_pass: bool
    g_lipschitz_pass: list[bool]
    ordered_pass: bool
    witnesses: list[dict] = field(default_factory=list)


def lipschitz_envelope_check(problem: FdeProblem, samples: int = 2000, seed: int = 0, rtol: float = 1e-12) -> EnvelopeReport:
    """Sample ``(t, x, x~)`` and test the envelopes ``m`` (for ``F``) and ``p_k`` (for ``g_k``)."""
    rng = np.random.default_rng(seed)
    t = rng.uniform(problem.t0, problem.T, samples)
    x = rng.uniform(*problem.x_range, samples)
    xt = rng.uniform(*problem.x_range, samples)
    dx = np.abs(x - xt)
    m = np.asarray(problem.m(t), dtype=float)
    lo1, hi1 = problem.image(t, x)
    lo2, hi2 = problem.image(t, xt)
    witnesses = []

    def slack(bound):
        return rtol * (np.abs(bound) + 1.0)

    ordered = (lo1 <= hi1) & (lo2 <= hi2)
    H = interval_hausdorff(lo1, hi1, lo2, hi2)
    f_ok = H <= m * dx + slack(m * dx)
    lo0, hi0 = problem.image(t, np.zeros_like(t))
    d0 = np.abs(np.clip(0.0, lo0, hi0))
    origin_ok = d0 <= m + slack(m)
    for name, ok in (("F-lipschitz", f_ok), ("F-origin", origin_ok), ("F-ordered", ordered)):
        if not ok.all():
            i = int(np.argmin(ok))
            witnesses.append({"check": name, "t": float(t[i]), "x": float(x[i]), "x_tilde": float(xt[i])})
    g_ok = []
    for k, (gk, pk) in enumerate(zip(problem.g, problem.p)):
        diff = np.abs(gk(t, x) - gk(t, xt))
        bound = np.asarray(pk(t), dtype=float) * dx
        ok = diff <= bound + slack(bound)
        g_ok.append(bool(ok.all()))
        if not ok.all():
            i = int(np.argmin(ok))
            witnesses.append({"check": f"g{k}-lipschitz", "t": float(t[i]), "x": float(x[i]), "x_tilde": float(xt[i])})
    passed = bool(f_ok.all() and origin_ok.all() and ordered.all() and all(g_ok))
    return EnvelopeReport(passed, samples, bool(f_ok.all()), bool(origin_ok.all()), g_ok, bool(ordered.all()), witnesses)


# }}}


# {{{ selections and the operator


def image_bounds(problem: FdeProblem, x: GridFunction) -> tuple[np.ndarray, np.ndarray]:
    lo, hi = problem.image(x.nodes, x.values)
    if np.any(lo > hi):
        i = int(np.argmax(lo > hi))
        raise PreconditionError(f"F has lo > hi at node {i} (t = {x.nodes[i]:.6g})")
    return lo, hi


def select(problem: FdeProblem, x: GridFunction, kind: str, w_prev: GridFunction | None = None) -> GridFunction:
    if kind not in SELECTION_KINDS:
        raise ValueError(f"unknown selection {kind!r}; expected one of {SELECTION_KINDS}")
    lo, hi = image_bounds(problem, x)
    if kind == "lower":
        return x.like(lo)
    if kind == "upper":
        return x.like(hi)
    if kind == "midpoint" or w_prev is None:
        return x.like(0.5 * (lo + hi))
    return proximal_selection(problem, x, w_prev)


def proximal_selection(problem: FdeProblem, x: GridFunction, w_prev: GridFunction) -> GridFunction:
    """Clamp ``w_prev`` into ``F(t, x(t))`` node by node."""
    if not x.same_grid(w_prev):
        raise PreconditionError("x and w_prev live on different grids")
    lo, hi = image_bounds(problem, x)
    return x.like(np.clip(w_prev.values, lo, hi))


def boundary_polynomial(problem: FdeProblem, M: int | None = None) -> GridFunction:
    """``sum_k a_k (t - alpha)^k / k!``; the solution when ``F = {0}`` and ``g = 0``."""
    t = np.linspace(problem.t0, problem.T, (M or problem.M) + 1)
    vals = sum(ak * (t - problem.alpha) ** k / math.factorial(k) for k, ak in enumerate(problem.a))
    return GridFunction(problem.t0, problem.T, np.asarray(vals, dtype=float) + np.zeros_like(t))


@dataclass
class LambdaResult:
    output: GridFunction
    selection: GridFunction
    residual: float | None = None


def _check_selection(problem: FdeProblem, x: GridFunction, w: GridFunction) -> None:
    lo, hi = image_bounds(problem, x)
    tol = 1e-12 * (1.0 + np.maximum(np.abs(lo), np.abs(hi)))
    bad = (w.values < lo - tol) | (w.values > hi + tol)
    if bad.any():
        i = int(np.argmax(bad))
        raise PreconditionError(
            f"selection leaves F(t, x(t)) at node {i} (t = {x.nodes[i]:.6g}): "
            f"w = {w.values[i]!r} not in [{lo[i]!r}, {hi[i]!r}]"
        )


def lambda_apply(problem: FdeProblem, x: GridFunction, w: GridFunction, residual: bool = False) -> LambdaResult:
    if not x.same_grid(w):
        raise PreconditionError("x and w live on different grids")
    if x.t0 != problem.t0 or x.T != problem.T:
        raise PreconditionError("grid does not cover the problem interval")
    _check_selection(problem, x, w)
    t = x.nodes
    out = rl_integral_grid(w, problem.beta)
    for k in range(problem.n):
        gk = x.like(problem.g[k](t, x.values))
        c = problem.a[k] + trapezoid_to(gk, problem.alpha) - rl_integral(w, problem.beta - k, problem.alpha)
        out = out + (t - problem.alpha) ** k / math.factorial(k) * c
    res = x.like(out)
    return LambdaResult(res, w, float(np.max(np.abs(x.values - out))) if residual else None)


# }}}


# {{{ successive approximation


@dataclass
class FdeSolverConfig:
    tol: float = 1e-12
    max_iter: int = 200
    selection: str = "proximal"
    initial_selection: str = "midpoint"
    variant: str = DEFAULT_VARIANT

    def __post_init__(self) -> None:
        if self.selection not in SELECTION_KINDS or self.initial_selection not in SELECTION_KINDS:
            raise ValueError("unknown selection kind")
        if not self.tol > 0 or self.max_iter < 1:
            raise ValueError("tol must be positive and max_iter at least 1")


@dataclass
class FdeSolution:
    solution: GridFunction
    selection: GridFunction
    steps: list[float]
    """``sup |x_{j+1} - x_j|`` per iteration."""
    residual: float
    """``sup |x - Lambda(x, w)|`` at the returned pair."""
    converged: bool
    certificate: bool
    """Whether ``w(t_i)`` lies in ``F(t_i, x(t_i))`` at every node."""
    condition: object
    warnings: list[str] = field(default_factory=list)

    @property
    def iterations(self) -> int:
        return len(self.steps)

    def step_ratios(self) -> list[float]:
        s = self.steps
        return [s[i + 1] / s[i] for i in range(len(s) - 1) if s[i] > 0 and s[i + 1] > 0]


def inclusion_certificate(problem: FdeProblem, x: GridFunction, w: GridFunction) -> bool:
    lo, hi = image_bounds(problem, x)
    return bool(np.all((w.values >= lo) & (w.values <= hi)))


def solve_inclusion(problem: FdeProblem, x0: GridFunction | None = None, cfg: FdeSolverConfig | None = None) -> FdeSolution:
    """Iterate ``x_{j+1} = Lambda(x_j, w_j)`` until ``sup |x_{j+1} - x_j| <= tol``.

    ``w_0`` is the initial selection of ``F(t, x_0)``; later selections follow
    ``cfg.selection`` (proximal: clamp the previous selection). A failed
    existence condition only produces a warning since it is sufficient, not necessary.
    """
    cfg = cfg or FdeSolverConfig()
    notes = []
    cond = condition_d_check(problem, cfg.variant)
    if not cond.satisfied:
        msg = f"existence condition fails: lhs = {cond.lhs:.6g} > exp(-tau) = {cond.bound:.6g}; iterating anyway"
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
        notes.append(msg)
    x = x0 if x0 is not None else boundary_polynomial(problem)
    if x.M != problem.M or x.t0 != problem.t0 or x.T != problem.T:
        raise PreconditionError("initial iterate must live on the problem grid")
    w = select(problem, x, cfg.initial_selection)
    steps: list[float] = []
    converged = False
    for j in range(cfg.max_iter):
        nxt = lambda_apply(problem, x, w).output
        step = float(np.max(np.abs(nxt.values - x.values)))
        steps.append(step)
        x = nxt
        w = select(problem, x, cfg.selection, w)
        if not math.isfinite(step):
            raise DivergenceError("iteration produced non-finite values", steps)
        if step <= cfg.tol:
            converged = True
            break
        if j >= 10 and step > 10 * steps[j - 10]:
            raise DivergenceError(f"step norm grew from {steps[j - 10]:.3g} to {step:.3g} over 10 iterations", steps)
    final = lambda_apply(problem, x, w, residual=True)
    return FdeSolution(
        solution=x,
        selection=w,
        steps=steps,
        residual=final.residual,
        converged=converged,
        certificate=inclusion_certificate(problem, x, w),
        condition=cond,
        warnings=notes,
    )


@dataclass
class ContractionEstimate:
    sup_ratio: float
    ratios: list[float]
    pairs: int
    excluded: int


def contraction_estimate(problem: FdeProblem, pairs: int = 50, seed: int = 0, x_range: tuple[float, float] | None = None) -> ContractionEstimate:
    """Sample ``||Lambda(x, w) - Lambda(x~, w~)|| / ||x - x~||`` with ``w~`` the proximal match of ``w``.

    ``x`` and ``x~`` have independent uniform node values in ``x_range``
    (default: the problem's envelope range); ``w`` is a uniform random point of ``F(t, x(t))``.
    """
    rng = np.random.default_rng(seed)
    lo_x, hi_x = x_range or problem.x_range
    M = problem.M
    ratios = []
    excluded = 0
    for _ in range(pairs):
        x = GridFunction(problem.t0, problem.T, rng.uniform(lo_x, hi_x, M + 1))
        xt = GridFunction(problem.t0, problem.T, rng.uniform(lo_x, hi_x, M + 1))
        denom = float(np.max(np.abs(x.values - xt.values)))
        if denom == 0:
            excluded += 1
            continue
        lo, hi = image_bounds(problem, x)
        w = x.like(lo + rng.uniform(0, 1, M + 1) * (hi - lo))
        wt = proximal_selection(problem, xt, w)
        v1 = lambda_apply(problem, x, w).output.values
        v2 = lambda_apply(problem, xt, wt).output.values
        ratios.append(float(np.max(np.abs(v1 - v2))) / denom)
    return ContractionEstimate(max(ratios) if ratios else 0.0, ratios, pairs, excluded)


# }}}
