"""Command-line front end.

Every subcommand builds one JSON report ``{schema_version, command, inputs,
results, discrepancies}``; printed tables are rendered from that report.

Exit codes: 0 success (certified, converged, condition satisfied), 1 a
computed negative verdict, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .catalog import (
    CLAIMED_CASES,
    MapDefinitionError,
    claimed_values,
    classify_case,
    example3,
    example5,
    load_map,
)
from .certify import (
    ContractionSpec,
    certify,
    nonlinear_ratio_limit,
    ordered_pairs,
    pair_check,
    sample_domain,
    weak_theta_check,
)
from .functions import BUILTIN_THETAS, RHO_KINDS, THETA_KINDS, RhoSpec, ThetaSpec, texp_criterion
from .inclusion import (
    DEFAULT_VARIANT,
    VARIANTS,
    DivergenceError,
    FdeSolverConfig,
    condition_d_check,
    lipschitz_envelope_check,
    solve_inclusion,
)
from .metric import MaxOutsideMetric
from .picard import SolverConfig, picard_cb, picard_compact
from .problem import ProblemError, load_problem

SCHEMA_VERSION = 1
DEFAULT_SEED = 0
VARIANT_ALIASES = {"paper-example": "dropped-factorials"}
AGREE_TOL = 1e-12

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _jsonable(obj):
    """Replace non-finite floats by strings so the output is strict JSON."""
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else str(obj)
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if hasattr(obj, "item"):
        return _jsonable(obj.item())
    return obj


def make_report(command: str, inputs: dict, results: dict, discrepancies: list | None = None) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "inputs": inputs,
        "results": results,
        "discrepancies": list(discrepancies or []),
    }


def dump_report(report: dict) -> str:
    return json.dumps(_jsonable(report), indent=2, allow_nan=False) + "\n"


def _emit(report: dict, out: str | None, table: str | None = None) -> None:
    text = dump_report(report)
    if out:
        Path(out).write_text(text)
        if table:
            sys.stdout.write(table)
    else:
        sys.stdout.write(table if table else text)


def _fmt(v, digits: int = 10) -> str:
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "yes" if v else "no"
    if isinstance(v, float):
        return format(v, f".{digits}g")
    return str(v)


def render_table(headers: list[str], rows: list[list]) -> str:
    cells = [[_fmt(c) for c in row] for row in rows]
    widths = [max(len(h), *(len(r[i]) for r in cells)) if cells else len(h) for i, h in enumerate(headers)]
    line = lambda r: "  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip()
    out = [line(headers), line(["-" * w for w in widths])]
    out += [line(r) for r in cells]
    return "\n".join(out) + "\n"


# {{{ certify


def _evens_ladder_strata(metric, report) -> tuple[dict, list]:
    """Per-case summary of the evidence and mismatches against the published case values."""
    strata: dict[int, dict] = {}
    mismatches: dict[int, dict] = {}
    for e in report.evidence:
        case = classify_case(metric, e.x, e.y)
        if case is None:
            continue
        s = strata.setdefault(case, {"case": case, "pairs": 0, "violations": 0, "max_margin": -math.inf})
        s["pairs"] += 1
        s["violations"] += not e.satisfied
        s["max_margin"] = max(s["max_margin"], e.margin)
        H_pub, _ = claimed_values(case, e.x, e.y)
        if abs(e.H - H_pub) > AGREE_TOL:
            m = mismatches.setdefault(
                case, {"case": case, "quantity": "H", "published": H_pub, "computed": e.H, "pairs": 0, "example_pair": [e.x, e.y]}
            )
            m["pairs"] += 1
    return dict(sorted(strata.items())), [mismatches[c] for c in sorted(mismatches)]


def run_certify(args) -> int:
    definition = load_map(args.map)
    spec = ContractionSpec(ThetaSpec(args.theta), RhoSpec(args.rho), args.k)
    points = sample_domain(definition.metric, definition.domain, args.seed)
    report = certify(definition.metric, definition.T, spec, ordered_pairs(points), {"points": len(points), **definition.domain})
    results = report.as_dict()
    discrepancies = []
    if isinstance(definition.metric, MaxOutsideMetric) and definition.T.name == "evens-ladder":
        strata, discrepancies = _evens_ladder_strata(definition.metric, report)
        results["strata"] = list(strata.values())
    inputs = {"map": args.map, "map_name": definition.name, "theta": args.theta, "rho": args.rho, "k": args.k, "seed": args.seed}
    _emit(make_report("certify", inputs, results, discrepancies), args.out)
    return EXIT_OK if report.verdict == "certified-on-sample" else EXIT_NEGATIVE


# }}}

# {{{ solve


def run_solve(args) -> int:
    definition = load_map(args.map)
    metric, T = definition.metric, definition.T
    if not metric.in_carrier(args.x0):
        raise InputError(f"x0 = {args.x0} is not in the carrier of {metric.describe()}")
    cfg = SolverConfig(tol=args.tol, max_iter=args.max_iter)
    solver = picard_compact if T.compact_valued else picard_cb
    trace = solver(metric, T, args.x0, cfg)
    results = {
        "algorithm": "nearest-point" if T.compact_valued else "h-relaxed",
        "termination": trace.termination,
        "steps": trace.steps,
        "fixed_point": trace.last,
        "residual": trace.residual,
        "points": trace.points,
        "sigma": trace.sigma,
    }
    inputs = {"map": args.map, "map_name": definition.name, "x0": args.x0, "tol": args.tol, "max_iter": args.max_iter}
    _emit(make_report("solve", inputs, results), args.out)
    return EXIT_OK if trace.termination == "fixed-point-found" else EXIT_NEGATIVE


# }}}

# {{{ fde


def _variant(name: str) -> str:
    name = VARIANT_ALIASES.get(name, name)
    if name not in VARIANTS:
        raise InputError(f"unknown variant {name!r}")
    return name


def run_fde(args) -> int:
    problem = load_problem(args.problem)
    variant = _variant(args.variant)
    tau = problem.tau if args.tau is None else args.tau
    inputs = {"problem": args.problem, "problem_name": problem.name, "variant": variant, "tau": tau, "M": problem.M}
    conditions = {v: condition_d_check(problem, v, tau).as_dict() for v in VARIANTS}
    chosen = conditions[variant]
    if args.action == "check":
        env = lipschitz_envelope_check(problem, seed=args.seed)
        results = {
            "condition": chosen,
            "conditions": conditions,
            "envelopes": {
                "passed": env.passed,
                "F_lipschitz": env.F_lipschitz_pass,
                "F_origin": env.F_origin_pass,
                "g_lipschitz": env.g_lipschitz_pass,
                "ordered": env.ordered_pass,
                "witnesses": env.witnesses[:5],
            },
        }
        _emit(make_report("fde-check", inputs, results), args.out)
        return EXIT_OK if chosen["satisfied"] else EXIT_NEGATIVE

    cfg = FdeSolverConfig(tol=args.tol, max_iter=args.max_iter, variant=variant)
    inputs.update({"tol": args.tol, "max_iter": args.max_iter})
    try:
        sol = solve_inclusion(problem, cfg=cfg)
    except DivergenceError as exc:
        results = {"converged": False, "error": str(exc), "steps": exc.steps, "condition": chosen}
        _emit(make_report("fde-solve", inputs, results), args.out)
        return EXIT_NEGATIVE
    if args.csv:
        Path(args.csv).write_text(sol.solution.to_csv())
    results = {
        "converged": sol.converged,
        "iterations": sol.iterations,
        "residual": sol.residual,
        "certificate": sol.certificate,
        "steps": sol.steps,
        "step_ratios": sol.step_ratios(),
        "condition": chosen,
        "warnings": sol.warnings,
        "solution_csv": args.csv,
        "solution": {"t0": sol.solution.t0, "T": sol.solution.T, "M": sol.solution.M, "values": sol.solution.values.tolist()},
    }
    _emit(make_report("fde-solve", inputs, results), args.out)
    return EXIT_OK if sol.converged and sol.certificate else EXIT_NEGATIVE


# }}}

# {{{ repro

EXAMPLE3_PAIRS = {1: (0.5, 0.0), 2: (4.0, 0.0), 3: (6.0, 0.0), 4: (4.0, 1.0), 5: (6.0, 1.0), 6: (8.0, 6.0)}
EXAMPLE3_K = math.exp(-1)
EXAMPLE5_PUBLISHED = {"gamma1 (dropped-factorials)": (2.07, 5e-3), "gamma2": (0.5727, 5e-5), "lhs": (0.83145, 1e-4)}


def _published_criterion(case: int, x: float, y: float) -> float:
    c = CLAIMED_CASES[case]
    if "criterion_bound" in c:
        return c["criterion_bound"]
    big = max(x, y)
    return (big - 2) / big * math.exp(-2)


def repro_example3() -> dict:
    ex = example3()
    metric, T = ex.metric, ex.T
    spec = ContractionSpec(ThetaSpec("exp-sqrt-texp"), RhoSpec("ciric-2"), EXAMPLE3_K)
    rows, discrepancies = [], []
    for case, (x, y) in EXAMPLE3_PAIRS.items():
        ev = pair_check(metric, T, spec, x, y)
        H_pub, u_pub = claimed_values(case, x, y)
        crit = texp_criterion(ev.H, ev.rho_value)
        crit_pub = _published_criterion(case, x, y)
        agree = (
            abs(ev.H - H_pub) <= AGREE_TOL
            and (u_pub is None or abs(ev.rho_value - u_pub) <= AGREE_TOL)
            and crit <= EXAMPLE3_K**2
        )
        rows.append(
            {
                "case": case, "x": x, "y": y, "H": ev.H, "H_published": H_pub, "u": ev.rho_value,
                "u_published": u_pub, "criterion": crit, "criterion_published": crit_pub,
                "satisfied": ev.satisfied, "agreement": agree,
            }
        )
        if not agree:
            discrepancies.append(
                {"case": case, "pair": [x, y], "quantity": "H", "published": H_pub, "computed": ev.H,
                 "consequence": "contraction inequality violated" if not ev.satisfied else "criterion differs"}
            )
    weak = []
    for theta in BUILTIN_THETAS:
        for k in [round(0.1 * i, 1) for i in range(1, 10)]:
            rep = weak_theta_check(metric, T, theta, k, [(1 / 9, 0.0)])
            weak.append({"theta": theta.name, "k": k, "violated": rep.verdict != "certified-on-sample"})
    ratios = nonlinear_ratio_limit(metric, T, RhoSpec("ciric-2"), range(6, 101, 2))
    return {
        "cases": rows,
        "weak_theta_at_one_ninth": {"all_violated": all(w["violated"] for w in weak), "checks": len(weak)},
        "ratio_trace": [{"x": r.x, "H": r.H, "u": r.u, "ratio": r.ratio} for r in ratios],
        "discrepancies": discrepancies,
    }


def repro_example5() -> dict:
    problem = example5()
    conds = {v: condition_d_check(problem, v) for v in VARIANTS}
    dropped = conds["dropped-factorials"]
    sol = solve_inclusion(problem)
    computed = {
        "||m||": dropped.m_norm,
        **{f"||p_{k}||": v for k, v in enumerate(dropped.p_norms)},
        "gamma1 (strict-d)": conds["strict-d"].gamma1,
        "gamma1 (dropped-factorials)": dropped.gamma1,
        "gamma2": dropped.gamma2,
        "lhs": dropped.lhs,
        "lhs (strict-d)": conds["strict-d"].lhs,
        "exp(-tau)": dropped.bound,
        "solver residual": sol.residual,
    }
    rows, discrepancies = [], []
    for name, value in computed.items():
        pub, tol = EXAMPLE5_PUBLISHED.get(name, (None, None))
        agree = None if pub is None else abs(value - pub) <= tol
        rows.append({"quantity": name, "computed": value, "published": pub, "tolerance": tol, "agreement": agree})
        if agree is False:
            discrepancies.append({"quantity": name, "published": pub, "computed": value, "difference": value - pub, "tolerance": tol})
    return {
        "rows": rows,
        "tau": dropped.tau,
        "condition_satisfied": {v: c.satisfied for v, c in conds.items()},
        "solver": {"converged": sol.converged, "iterations": sol.iterations, "certificate": sol.certificate},
        "discrepancies": discrepancies,
    }


def run_repro(args) -> int:
    if args.name == "example-3":
        res = repro_example3()
        headers = ["case", "x", "y", "H", "H_published", "u", "u_published", "criterion", "criterion_published", "agreement"]
        table = render_table(headers, [[r[h] for h in headers] for r in res["cases"]])
        w = res["weak_theta_at_one_ninth"]
        table += f"weak contraction at (1/9, 0) violated for all {w['checks']} (theta, k) checks: {_fmt(w['all_violated'])}\n"
    else:
        res = repro_example5()
        headers = ["quantity", "computed", "published", "agreement"]
        table = render_table(headers, [[r[h] for h in headers] for r in res["rows"]])
    discrepancies = res.pop("discrepancies")
    _emit(make_report("repro", {"name": args.name}, res, discrepancies), args.out, table)
    return EXIT_OK


# }}}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="thetarho", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("certify", help="check the contraction inequality over a sampled pair domain")
    c.add_argument("--map", required=True)
    c.add_argument("--theta", required=True, choices=[t for t in THETA_KINDS if t != "custom"])
    c.add_argument("--rho", required=True, choices=[r for r in RHO_KINDS if r != "custom-coefficients"])
    c.add_argument("--k", required=True, type=float)
    c.add_argument("--seed", type=int, default=DEFAULT_SEED)
    c.add_argument("--out")
    c.set_defaults(func=run_certify)

    s = sub.add_parser("solve", help="fixed-point iteration for a set-valued map")
    s.add_argument("--map", required=True)
    s.add_argument("--x0", required=True, type=float)
    s.add_argument("--tol", type=float, default=1e-9)
    s.add_argument("--max-iter", type=int, default=1000)
    s.add_argument("--out")
    s.set_defaults(func=run_solve)

    f = sub.add_parser("fde", help="existence condition and successive approximation for a Caputo inclusion")
    f.add_argument("action", choices=["check", "solve"])
    f.add_argument("--problem", required=True)
    f.add_argument("--variant", default=DEFAULT_VARIANT, choices=[*VARIANTS, *VARIANT_ALIASES])
    f.add_argument("--tau", type=float)
    f.add_argument("--tol", type=float, default=1e-12)
    f.add_argument("--max-iter", type=int, default=200)
    f.add_argument("--seed", type=int, default=DEFAULT_SEED)
    f.add_argument("--csv", help="write the solution grid function here")
    f.add_argument("--out")
    f.set_defaults(func=run_fde)

    r = sub.add_parser("repro", help="recompute the bundled worked examples")
    r.add_argument("name", choices=["example-3", "example-5"])
    r.add_argument("--out")
    r.set_defaults(func=run_repro)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, MapDefinitionError, ProblemError, ValueError, OSError) as exc:
        print(f"thetarho {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
