"""Gamma function, Riemann-Liouville integrals and Caputo derivatives on uniform grids.

The integrals use product integration: the integrand is replaced by its
piecewise-linear interpolant and integrated exactly against the kernel
``(t - s)^(beta - 1)``, so the weak singularity for ``beta < 1`` costs nothing.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .metric import DomainError


def gamma_fn(z: float) -> float:
    if not z > 0:
        raise DomainError(f"gamma_fn is restricted to z > 0, got {z}")
    return math.gamma(z)


@dataclass(frozen=True)
class GridFunction:
    """Values on the uniform grid ``t_i = t0 + i h``, ``i = 0..M``."""

    t0: float
    T: float
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size < 3:
            raise ValueError("a grid function needs at least M = 2 intervals")
        if not self.t0 < self.T:
            raise ValueError(f"need t0 < T, got [{self.t0}, {self.T}]")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def from_callable(cls, f: Callable, t0: float, T: float, M: int = 1000) -> "GridFunction":
        t = np.linspace(t0, T, M + 1)
        return cls(t0, T, np.broadcast_to(np.asarray(f(t), dtype=float), t.shape).copy())

    @classmethod
    def constant(cls, c: float, t0: float, T: float, M: int = 1000) -> "GridFunction":
        return cls(t0, T, np.full(M + 1, float(c)))

    @property
    def M(self) -> int:
        return self.values.size - 1

    @property
    def h(self) -> float:
        return (self.T - self.t0) / self.M

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(self.t0, self.T, self.M + 1)

    def norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def like(self, values) -> "GridFunction":
        return GridFunction(self.t0, self.T, values)

    def same_grid(self, other: "GridFunction") -> bool:
        return self.t0 == other.t0 and self.T == other.T and self.M == other.M

    def __call__(self, t):
        return np.interp(t, self.nodes, self.values)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "value"])
        for t, v in zip(self.nodes, self.values):
            w.writerow([format(t, ".15g"), format(v, ".15g")])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "GridFunction":
        rows = list(csv.reader(io.StringIO(text)))
        if rows[0] != ["t", "value"]:
            raise ValueError(f"expected header t,value, got {rows[0]}")
        t = np.array([float(r[0]) for r in rows[1:]])
        v = np.array([float(r[1]) for r in rows[1:]])
        if not np.allclose(np.diff(t), (t[-1] - t[0]) / (t.size - 1), rtol=1e-9, atol=1e-14):
            raise ValueError("grid is not uniform")
        return cls(float(t[0]), float(t[-1]), v)


def _kernel_moments(A: np.ndarray, B: np.ndarray, beta: float):
    # int_B^A u^(beta-1) du and int_B^A u^beta du
    k0 = (A**beta - B**beta) / beta
    k1 = (A ** (beta + 1) - B ** (beta + 1)) / (beta + 1)
    return k0, k1


def product_weights(beta: float, M: int, h: float) -> tuple[np.ndarray, np.ndarray]:
    """Toeplitz weights ``(left, right)`` indexed by ``m = j - i = 1..M``.

    ``I f(t_j) = sum_{i<j} left[j-i] f_i + right[j-i] f_{i+1}`` before the
    ``1/Gamma(beta)`` factor; index 0 is unused.
    """
    m = np.arange(1, M + 1, dtype=float)
    A, B = m * h, (m - 1) * h
    k0, k1 = _kernel_moments(A, B, beta)
    left = np.zeros(M + 1)
    right = np.zeros(M + 1)
    left[1:] = (k1 - B * k0) / h
    right[1:] = (A * k0 - k1) / h
    return left, right


def rl_integral_grid(f: GridFunction, beta: float) -> np.ndarray:
    """``I^beta f`` at every node."""
    if not beta > 0:
        raise DomainError(f"fractional order must be positive, got {beta}")
    M, v = f.M, f.values
    left, right = product_weights(beta, M, f.h)
    out = np.convolve(v[:-1], left[1:])[:M] + np.convolve(v[1:], right[1:])[:M]
    res = np.zeros(M + 1)
    res[1:] = out
    return res / math.gamma(beta)


def rl_integral(f: GridFunction, beta: float, t: float) -> float:
    """``I^beta f(t)`` for any ``t`` in ``[t0, T]``; off-node points use the interpolant."""
    if not beta > 0:
        raise DomainError(f"fractional order must be positive, got {beta}")
    if not f.t0 <= t <= f.T + 1e-12 * (f.T - f.t0):
        raise DomainError(f"t = {t} lies outside [{f.t0}, {f.T}]")
    t = min(t, f.T)
    if t == f.t0:
        return 0.0
    nodes, v, h = f.nodes, f.values, f.h
    j = min(int(math.floor((t - f.t0) / h + 1e-9)), f.M)
    total = 0.0
    if j > 0:
        s = nodes[: j + 1]
        A, B = t - s[:-1], t - s[1:]
        k0, k1 = _kernel_moments(A, B, beta)
        total += float(np.sum((k1 - B * k0) / h * v[:j] + (A * k0 - k1) / h * v[1 : j + 1]))
    if t > nodes[j] and j < f.M:
        # partial interval [t_j, t] with the interpolant endpoint value at t
        width = t - nodes[j]
        ft = v[j] + (v[j + 1] - v[j]) * width / h
        A, B = width, 0.0
        k0, k1 = _kernel_moments(np.array(A), np.array(B), beta)
        total += float((k1 - B * k0) / width * v[j] + (A * k0 - k1) / width * ft)
    return total / math.gamma(beta)


def trapezoid_to(f: GridFunction, t: float) -> float:
    """``int_{t0}^t f`` of the piecewise-linear interpolant."""
    return rl_integral(f, 1.0, t)


def _fd_derivative(v: np.ndarray, h: float, order: int) -> np.ndarray:
    for _ in range(order):
        v = np.gradient(v, h, edge_order=2)
    return v


def caputo_deriv(f, beta: float, t0: float = 0.0, T: float = 1.0, M: int = 1000, nth_derivative=None) -> GridFunction:
    """Caputo derivative of order ``beta`` on the grid of ``f``.

    ``f`` is a :class:`GridFunction` (its ``n``-th derivative is taken by
    second-order finite differences) or a callable together with
    ``nth_derivative``, the analytic ``f^(n)``.
    """
    if beta <= 0 or float(beta).is_integer():
        raise DomainError(f"Caputo order must be positive and non-integer, got {beta}")
    n = math.floor(beta) + 1
    if isinstance(f, GridFunction):
        dn = f.like(_fd_derivative(f.values, f.h, n))
    else:
        if nth_derivative is None:
            raise ValueError("a callable f needs its analytic n-th derivative")
        dn = GridFunction.from_callable(nth_derivative, t0, T, M)
    return dn.like(rl_integral_grid(dn, n - beta))
