"""Map definition files and the bundled worked examples."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .metric import (
    AbsoluteDifference,
    MaxOutsideMetric,
    MetricRule,
    MultiMap,
    TableMetric,
    evens_ladder_map,
    finite_table_map,
    interval_affine_map,
    singleton_affine_map,
)
from .problem import FdeProblem, ProblemError, constant, load_problem


class MapDefinitionError(ValueError):
    pass


def data_path(name: str) -> Path:
    return Path(str(resources.files("thetarho") / "data" / name))


EXAMPLE3_MAP = "example3_map.json"
EXAMPLE5_PROBLEM = "example5_problem.json"
DESK_PROBLEM = "desk_problem.json"
ZERO_RHS_PROBLEM = "zero_rhs_problem.json"
HALVING_MAP = "halving_map.json"


@dataclass
class MapDefinition:
    name: str
    metric: MetricRule
    T: MultiMap
    domain: dict


def _metric_from_dict(doc: dict) -> MetricRule:
    kind = doc.get("kind")
    if kind == "absolute-difference":
        carrier = doc.get("carrier")
        return AbsoluteDifference(None if carrier is None else (constant(carrier[0]), constant(carrier[1])))
    if kind == "max-outside":
        core = doc.get("core", (0, 2))
        return MaxOutsideMetric((constant(core[0]), constant(core[1])), int(doc.get("evens_from", 4)))
    if kind == "custom-table":
        return TableMetric([constant(p) for p in doc["carrier"]], doc["matrix"])
    raise MapDefinitionError(f"unknown metric kind {kind!r}")


def map_from_dict(doc: dict) -> MapDefinition:
    try:
        metric = _metric_from_dict(doc["metric"])
        m = doc["map"]
        kind = m.get("kind")
        if kind == "evens-ladder":
            if not isinstance(metric, MaxOutsideMetric):
                raise MapDefinitionError("evens-ladder needs the max-outside metric")
            T = evens_ladder_map(metric, constant(m.get("zero_image", "8/9")))
        elif kind == "interval-affine":
            T = interval_affine_map(
                metric,
                (constant(m["lo"][0]), constant(m["lo"][1])),
                (constant(m["hi"][0]), constant(m["hi"][1])),
            )
        elif kind == "singleton-affine":
            T = singleton_affine_map(metric, constant(m["slope"]), constant(m.get("offset", 0)))
        elif kind == "finite-table":
            T = finite_table_map(metric, {constant(k): [constant(v) for v in vs] for k, vs in m["table"].items()})
        else:
            raise MapDefinitionError(f"unknown map kind {kind!r}")
        return MapDefinition(str(doc.get("name", "map")), metric, T, dict(doc.get("domain", {})))
    except (KeyError, IndexError, TypeError) as exc:
        raise MapDefinitionError(f"malformed map definition: {exc!r}") from None
    except ProblemError as exc:
        raise MapDefinitionError(str(exc)) from None


def load_map(path: str | Path) -> MapDefinition:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise MapDefinitionError(f"{path}: invalid JSON ({exc.msg})") from None
    if not isinstance(doc, dict):
        raise MapDefinitionError(f"{path}: top level must be an object")
    return map_from_dict(doc)


def example3() -> MapDefinition:
    return load_map(data_path(EXAMPLE3_MAP))


def example5() -> FdeProblem:
    return load_problem(data_path(EXAMPLE5_PROBLEM))


def desk_problem() -> FdeProblem:
    return load_problem(data_path(DESK_PROBLEM))


def zero_rhs_problem() -> FdeProblem:
    return load_problem(data_path(ZERO_RHS_PROBLEM))


# {{{ evens-ladder case analysis

# Published (H, u) per case; ``None`` marks parametric entries (H = x - 2, u = x).
CLAIMED_CASES = {
    1: {"H": 1 / 9, "u": None, "criterion_bound": 1 / 8},
    2: {"H": 10 / 9, "u": 4.0, "criterion_bound": 10 / 36 * math.exp(-26 / 9)},
    3: {"H": None, "u": None},
    4: {"H": 1.0, "u": 4.0, "criterion_bound": 0.25 * math.exp(-3)},
    5: {"H": None, "u": None},
    6: {"H": None, "u": None},
}


def classify_case(metric: MaxOutsideMetric, x: float, y: float) -> int | None:
    """Case number of an unordered pair of the evens-ladder map, or ``None`` if ``H = 0``."""
    if x == y:
        return None
    hi_pt, lo_pt = max(x, y), min(x, y)
    core_hi = metric.in_core(hi_pt)
    if core_hi:
        # both in the core: only pairs involving 0 have distinct images
        return 1 if lo_pt == 0 else None
    if lo_pt == 0:
        return 2 if hi_pt == 4 else 3
    if metric.in_core(lo_pt):
        return 4 if hi_pt == 4 else 5
    return 6


def claimed_values(case: int, x: float, y: float) -> tuple[float, float | None]:
    """Published ``(H, u)`` for a pair.

    Parametric cases use ``H = x - 2`` and ``u = d(x, y) = x``. Case 1 publishes
    only a criterion bound, so its ``u`` is ``None``.
    """
    big = max(x, y)
    c = CLAIMED_CASES[case]
    H = c["H"] if c["H"] is not None else big - 2
    if case == 1:
        return H, None
    u = c["u"] if c["u"] is not None else big
    return H, u


# }}}
