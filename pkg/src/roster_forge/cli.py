"""Command-line front door: solve instances, validate schedules, run gap suites.

Exit codes are stable: 0 success (solve: feasible; check: no hard
violations), 1 usage/parse errors, 2 solve converged infeasible or check
found hard violations, 3 solver hit its iteration cap.  Set
``ROSTER_FORGE_LOG`` (debug/info/warning) for trace-level logging.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from .generate import random_instance
from .io import (
    BENCHMARKS,
    InstanceParseError,
    ScheduleParseError,
    load_benchmark,
    load_instance,
    load_schedule,
    render_roster_table,
    render_schedule,
    render_violations,
    breakdown_to_dict,
)
from .model import Instance, InstanceValidationError, soft_and_base_bound
from .oracle import OracleLimits, OracleResult, solve_exact
from .solver import SELECTION_MODES, SolverConfig, solve

log = logging.getLogger(__name__)

CONFIG_FIELDS = {
    "selection",
    "max_iterations",
    "hard_weight",
    "shortfall_weight",
    "excess_weight",
    "seedless",
}


class CliError(Exception):
    """Operational CLI failure; message goes to stderr, exit code is 1."""


def _configure_logging() -> None:
    level_name = os.environ.get("ROSTER_FORGE_LOG", "").strip()
    if not level_name:
        return
    level = getattr(logging, level_name.upper(), None)
    if not isinstance(level, int):
        level = logging.DEBUG
    logging.basicConfig(
        level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s"
    )


def _load_config(path: str | None, args: argparse.Namespace) -> SolverConfig:
    values: dict = {}
    if path:
        try:
            with open(path, encoding="utf-8") as handle:
                doc = json.load(handle)
        except OSError as exc:
            raise CliError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise CliError(f"config {path} is not valid JSON: {exc}") from exc
        if not isinstance(doc, dict):
            raise CliError(f"config {path} must be a JSON object")
        unknown = sorted(set(doc) - CONFIG_FIELDS)
        if unknown:
            raise CliError(f"config {path} has unknown fields {unknown}")
        if doc.get("seedless") is False:
            raise CliError("config: the solver is deterministic; 'seedless' must be true")
        values = {key: doc[key] for key in doc if key != "seedless"}
    if getattr(args, "selection", None):
        values["selection"] = args.selection
    if getattr(args, "max_iterations", None) is not None:
        values["max_iterations"] = args.max_iterations
    config = SolverConfig(**values)
    if config.selection not in SELECTION_MODES:
        raise CliError(
            f"unknown selection {config.selection!r}; pick one of {', '.join(SELECTION_MODES)}"
        )
    return config


def _resolve_instance(ref: str) -> Instance:
    try:
        if ref in BENCHMARKS:
            return load_benchmark(ref)
        return load_instance(ref)
    except FileNotFoundError:
        raise CliError(
            f"no such instance file {ref!r} (benchmark names: {', '.join(BENCHMARKS)})"
        ) from None
    except (InstanceParseError, InstanceValidationError) as exc:
        raise CliError(f"cannot load instance {ref!r}: {exc}") from exc


def _warn_weight_hierarchy(instance: Instance, config: SolverConfig) -> None:
    model = config.cost_model(instance)
    hard_weights = {model.weights[f] for f in model.hard_families()}
    if not hard_weights:
        return
    bound = soft_and_base_bound(instance)
    lowest = min(hard_weights)
    if lowest <= bound:
        print(
            f"warning: hard weight {lowest} does not dominate the achievable "
            f"soft-plus-base bound {bound}; hard violations may be traded away",
            file=sys.stderr,
        )


def _cmd_solve(args: argparse.Namespace) -> int:
    config = _load_config(args.config, args)
    instance = _resolve_instance(args.instance)
    _warn_weight_hierarchy(instance, config)
    result = solve(instance, config)
    output = render_schedule(result, args.format, config.cost_model(instance))
    sys.stdout.write(output)
    if args.format == "table":
        status = "feasible" if result.feasible else "infeasible"
        if not result.converged:
            status += " (iteration cap reached)"
        sys.stdout.write(
            f"\n{status}; {result.iterations} iterations in {result.wall_time * 1000.0:.1f} ms\n"
        )
    if args.report_dir:
        from .report import write_solve_report

        for path in write_solve_report(result, args.report_dir):
            print(f"wrote {path}", file=sys.stderr)
    if not result.converged:
        return 3
    return 0 if result.feasible else 2


def _cmd_check(args: argparse.Namespace) -> int:
    config = _load_config(args.config, args)
    instance = _resolve_instance(args.instance)
    model = config.cost_model(instance)
    try:
        schedule = load_schedule(args.schedule, instance)
    except FileNotFoundError:
        raise CliError(f"no such schedule file {args.schedule!r}") from None
    except ScheduleParseError as exc:
        raise CliError(f"cannot load schedule {args.schedule!r}: {exc}") from exc
    violations = model.violations(schedule)
    breakdown = model.evaluate(schedule)
    if args.format == "json":
        doc = {
            "instance": instance.name,
            "violations": [
                {
                    "family": v.family,
                    "severity": "hard" if model.is_hard(v.family) else "soft",
                    "nurse": v.nurse,
                    "shift": v.shift,
                    "day": v.day,
                    "tier": v.tier,
                    "magnitude": v.magnitude,
                    "penalty": v.penalty,
                }
                for v in violations
            ],
            "breakdown": breakdown_to_dict(breakdown),
        }
        sys.stdout.write(json.dumps(doc, indent=2) + "\n")
    else:
        sys.stdout.write(render_roster_table(schedule, breakdown, model))
        sys.stdout.write("\n" + render_violations(violations))
        hard_count = sum(1 for v in violations if model.is_hard(v.family))
        sys.stdout.write(
            f"\n{hard_count} hard violation(s), soft penalty {breakdown.soft_penalty}\n"
        )
    return 0 if breakdown.hard_penalty == 0 else 2


def _cmd_gap(args: argparse.Namespace) -> int:
    if args.count < 0:
        raise CliError("--count must be >= 0")
    limits = OracleLimits(max_cells=args.max_cells)
    cell_count = args.nurses * args.shifts * args.days
    if cell_count > limits.max_cells:
        raise CliError(
            f"{args.nurses}x{args.shifts}x{args.days} = {cell_count} cells exceeds the "
            f"oracle cap {limits.max_cells}; raise --max-cells deliberately"
        )
    rows = []
    for index in range(args.count):
        seed = args.seed + index
        instance = random_instance(seed, args.nurses, args.shifts, args.days)
        heuristic = solve(instance, SolverConfig())
        exact: OracleResult = solve_exact(instance, limits)
        gap = (heuristic.breakdown.total - exact.optimal_cost) / max(1, exact.optimal_cost)
        rows.append(
            {
                "index": index,
                "seed": seed,
                "nurses": args.nurses,
                "shifts": args.shifts,
                "days": args.days,
                "heuristic_cost": heuristic.breakdown.total,
                "optimal_cost": exact.optimal_cost,
                "relative_gap": gap,
                "nodes_explored": exact.nodes_explored,
            }
        )
    gaps = [row["relative_gap"] for row in rows]
    summary = {
        "count": len(rows),
        "mean_gap": (sum(gaps) / len(gaps)) if gaps else 0.0,
        "max_gap": max(gaps) if gaps else 0.0,
        "optimal_hits": sum(1 for g in gaps if g == 0),
    }

    if args.format == "json":
        sys.stdout.write(json.dumps({"instances": rows, "summary": summary}, indent=2) + "\n")
    elif args.format == "csv":
        columns = ["index", "seed", "nurses", "shifts", "days",
                   "heuristic_cost", "optimal_cost", "relative_gap", "nodes_explored"]
        sys.stdout.write(",".join(columns) + "\n")
        for row in rows:
            sys.stdout.write(",".join(str(row[column]) for column in columns) + "\n")
    else:
        for row in rows:
            sys.stdout.write(
                f"seed {row['seed']:>6}  heuristic {row['heuristic_cost']:>10}  "
                f"optimal {row['optimal_cost']:>10}  gap {row['relative_gap']:.4f}\n"
            )
        sys.stdout.write(
            f"\n{summary['count']} instances: mean gap {summary['mean_gap']:.4f}, "
            f"max gap {summary['max_gap']:.4f}, "
            f"optimum matched {summary['optimal_hits']} time(s)\n"
        )
    if args.report_dir:
        from .report import write_gap_report

        for path in write_gap_report(rows, summary, args.report_dir):
            print(f"wrote {path}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="roster-forge",
        description="Cost-based nurse rostering solver with an exact oracle for tiny instances.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve_parser = sub.add_parser("solve", help="solve an instance file or embedded benchmark")
    solve_parser.add_argument("instance", help=f"path or benchmark name ({', '.join(BENCHMARKS)})")
    solve_parser.add_argument("--config", help="JSON solver config file")
    solve_parser.add_argument("--format", choices=("table", "csv", "json"), default="table")
    solve_parser.add_argument("--selection", choices=SELECTION_MODES, default=None)
    solve_parser.add_argument("--max-iterations", type=int, default=None)
    solve_parser.add_argument("--report-dir", help="also write csv/json/figure report files here")
    solve_parser.set_defaults(func=_cmd_solve)

    check_parser = sub.add_parser("check", help="evaluate a schedule file against an instance")
    check_parser.add_argument("instance", help=f"path or benchmark name ({', '.join(BENCHMARKS)})")
    check_parser.add_argument("schedule", help="schedule file (.csv or .json)")
    check_parser.add_argument("--config", help="JSON solver config file")
    check_parser.add_argument("--format", choices=("table", "json"), default="table")
    check_parser.set_defaults(func=_cmd_check)

    gap_parser = sub.add_parser("gap", help="heuristic-vs-oracle gap suite on random instances")
    gap_parser.add_argument("--count", type=int, default=20)
    gap_parser.add_argument("--nurses", type=int, default=3)
    gap_parser.add_argument("--shifts", type=int, default=2)
    gap_parser.add_argument("--days", type=int, default=3)
    gap_parser.add_argument("--seed", type=int, default=0)
    gap_parser.add_argument("--max-cells", type=int, default=24)
    gap_parser.add_argument("--format", choices=("table", "csv", "json"), default="table")
    gap_parser.add_argument("--report-dir", help="also write csv/json/figure report files here")
    gap_parser.set_defaults(func=_cmd_gap)
    return parser


def main(argv: list[str] | None = None) -> int:
    _configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (InstanceParseError, InstanceValidationError, ScheduleParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
