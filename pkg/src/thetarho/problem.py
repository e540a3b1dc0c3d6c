"""Problem definitions for Caputo inclusions with nonlocal integral boundary data.

Coefficient functions are written in a small expression language over ``t``
and ``x``: numbers, ``+ - * / **``, parentheses and the functions ``abs``,
``exp``, ``sqrt``, ``log``. Expressions are parsed with :mod:`ast` and
rejected unless every node is on the whitelist.
"""

from __future__ import annotations

import ast
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

_FUNCS = {"abs": np.abs, "exp": np.exp, "sqrt": np.sqrt, "log": np.log}
_CONSTS = {"pi": math.pi, "e": math.e}
_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)


class ProblemError(ValueError):
    """Malformed or inconsistent problem definition."""


class Expr:
    """A whitelisted arithmetic expression in ``t`` and ``x``."""

    def __init__(self, source: str | float | int, variables: tuple[str, ...] = ("t", "x")) -> None:
        self.source = str(source)
        self.variables = variables
        try:
            tree = ast.parse(self.source, mode="eval")
        except SyntaxError as exc:
            raise ProblemError(f"cannot parse expression {self.source!r}: {exc.msg}") from None
        for node in ast.walk(tree):
            self._check(node)
        self._code = compile(tree, "<expr>", "eval")

    def _check(self, node: ast.AST) -> None:
        if isinstance(node, (ast.Expression, ast.Load, ast.USub, ast.UAdd, *_BINOPS)):
            return
        if isinstance(node, ast.BinOp) and isinstance(node.op, _BINOPS):
            return
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            return
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) and not isinstance(node.value, bool):
            return
        if isinstance(node, ast.Name) and (node.id in self.variables or node.id in _CONSTS or node.id in _FUNCS):
            return
        if (
            isinstance(node, ast.Call)
            and isinstance(node.func, ast.Name)
            and node.func.id in _FUNCS
            and len(node.args) == 1
            and not node.keywords
        ):
            return
        raise ProblemError(f"unsupported syntax in expression {self.source!r}: {type(node).__name__}")

    def __call__(self, t, x=0.0):
        env = {"__builtins__": {}, **_FUNCS, **_CONSTS, "t": np.asarray(t, dtype=float), "x": np.asarray(x, dtype=float)}
        with np.errstate(divide="ignore", invalid="ignore"):
            out = eval(self._code, env)
        return np.broadcast_to(np.asarray(out, dtype=float), np.broadcast(env["t"], env["x"]).shape)

    def __repr__(self) -> str:
        return f"Expr({self.source!r})"


def constant(value: Any) -> float:
    """Numeric field that may also be written as a constant expression such as ``"1/6"``."""
    if isinstance(value, bool):
        raise ProblemError(f"expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        return float(Expr(value, variables=())(0.0))
    raise ProblemError(f"expected a number, got {value!r}")


def _g_expr(spec: Any) -> Expr:
    if isinstance(spec, (str, int, float)) and not isinstance(spec, bool):
        return Expr(spec)
    if not isinstance(spec, dict):
        raise ProblemError(f"g entry must be an expression or a form, got {spec!r}")
    form = spec.get("form")
    if form == "zero":
        return Expr("0")
    if form == "power-exp":
        c = constant(spec.get("c", 1.0))
        k = constant(spec.get("power", 0))
        return Expr(f"{c!r} * t ** {k!r} * exp(-x)")
    if "expr" in spec:
        return Expr(spec["expr"])
    raise ProblemError(f"unknown g form {form!r}")


@dataclass
class FdeProblem:
    beta: float
    t0: float
    T: float
    alpha: float
    a: tuple[float, ...]
    g: tuple[Expr, ...]
    F_lo: Expr
    F_hi: Expr
    m: Expr
    p: tuple[Expr, ...]
    tau: float
    M: int = 1000
    x_range: tuple[float, float] = (-10.0, 10.0)
    """State range sampled when checking the Lipschitz envelopes."""
    name: str = "problem"
    source: dict = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        if not self.beta > 0 or float(self.beta).is_integer():
            raise ProblemError(f"beta must be positive and non-integer, got {self.beta}")
        if not self.t0 < self.alpha < self.T:
            raise ProblemError(f"alpha must lie strictly inside ({self.t0}, {self.T}), got {self.alpha}")
        n = self.n
        for label, seq in (("a", self.a), ("g", self.g), ("p", self.p)):
            if len(seq) != n:
                raise ProblemError(f"{label} needs n = floor(beta) + 1 = {n} entries, got {len(seq)}")
        if self.M < 2:
            raise ProblemError("grid needs M >= 2")
        if not self.tau > 0:
            raise ProblemError("tau must be positive")
        if not self.x_range[0] < self.x_range[1]:
            raise ProblemError("x_range must be an increasing pair")

    @property
    def n(self) -> int:
        return math.floor(self.beta) + 1

    @property
    def nodes(self) -> np.ndarray:
        return np.linspace(self.t0, self.T, self.M + 1)

    def image(self, t, x) -> tuple[np.ndarray, np.ndarray]:
        return np.asarray(self.F_lo(t, x), dtype=float), np.asarray(self.F_hi(t, x), dtype=float)

    def with_grid(self, M: int) -> "FdeProblem":
        kw = {f: getattr(self, f) for f in self.__dataclass_fields__}
        kw["M"] = M
        return FdeProblem(**kw)


def problem_from_dict(doc: dict) -> FdeProblem:
    try:
        beta = constant(doc["beta"])
        n = math.floor(beta) + 1
        a = tuple(constant(v) for v in doc["a"])
        g = tuple(_g_expr(v) for v in doc.get("g", [{"form": "zero"}] * n))
        F = doc["F"]
        p = tuple(Expr(v) for v in doc.get("p", ["0"] * n))
        grid = doc.get("grid", {})
        return FdeProblem(
            beta=beta,
            t0=constant(doc["t0"]),
            T=constant(doc["T"]),
            alpha=constant(doc["alpha"]),
            a=a,
            g=g,
            F_lo=Expr(F["lo"]),
            F_hi=Expr(F["hi"]),
            m=Expr(doc.get("m", "0")),
            p=p,
            tau=constant(doc.get("tau", 1.0)),
            M=int(grid.get("M", 1000)),
            x_range=tuple(constant(v) for v in doc.get("x_range", (-10.0, 10.0))),
            name=str(doc.get("name", "problem")),
            source=doc,
        )
    except KeyError as exc:
        raise ProblemError(f"missing field {exc.args[0]!r}") from None
    except TypeError as exc:
        raise ProblemError(str(exc)) from None


def load_problem(path: str | Path) -> FdeProblem:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ProblemError(f"{path}: invalid JSON ({exc.msg})") from None
    if not isinstance(doc, dict):
        raise ProblemError(f"{path}: top level must be an object")
    return problem_from_dict(doc)
