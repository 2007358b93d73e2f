"""Instance and schedule serialization, embedded benchmarks, roster rendering.

Instance files are strict UTF-8 JSON documents with extension
``.roster.json``: unknown fields are rejected, and parsing a rendered
instance reproduces it exactly.  Schedules travel as dense CSV
(``nurse_id,day,shift,assigned`` in nurse-major order) or as part of the
full-result JSON.  Everything here is a pure function and thread-safe.
"""

from __future__ import annotations

import csv
import io as _stdio
import json
from importlib import resources

import numpy as np

from .cost import CostBreakdown, CostModel, Violation
from .model import (
    ConstraintSpec,
    Instance,
    Nurse,
    RuleParams,
    Schedule,
    ShiftType,
    validate_instance,
)
from .solver import SolveResult

SCHEMA_VERSION = "1"

BENCHMARKS = ("ozkarahan89", "li03")

SCHEDULE_CSV_COLUMNS = ("nurse_id", "day", "shift", "assigned")


class InstanceParseError(ValueError):
    """A document failed strict instance parsing; the message carries the locus."""


class ScheduleParseError(ValueError):
    """A schedule file is malformed or does not fit the instance."""


def _fail(path: str, message: str):
    raise InstanceParseError(f"{path}: {message}")


def _expect_keys(obj: dict, path: str, required: set[str], optional: set[str] = frozenset()):
    if not isinstance(obj, dict):
        _fail(path, f"expected an object, got {type(obj).__name__}")
    unknown = sorted(set(obj) - required - set(optional))
    if unknown:
        _fail(path, f"unknown fields {unknown}")
    missing = sorted(required - set(obj))
    if missing:
        _fail(path, f"missing required fields {missing}")


def _as_int(value, path: str, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        _fail(path, f"expected an integer, got {value!r}")
    if minimum is not None and value < minimum:
        _fail(path, f"must be >= {minimum}, got {value}")
    return value


def _as_str(value, path: str) -> str:
    if not isinstance(value, str):
        _fail(path, f"expected a string, got {value!r}")
    return value


def _as_bool(value, path: str) -> bool:
    if not isinstance(value, bool):
        _fail(path, f"expected a boolean, got {value!r}")
    return value


def _as_list(value, path: str) -> list:
    if not isinstance(value, list):
        _fail(path, f"expected a list, got {type(value).__name__}")
    return value


def parse_instance(text: str) -> Instance:
    """Parse and validate one instance document; raises
    :class:`InstanceParseError` with a field locus on any defect."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceParseError(f"not valid JSON: {exc}") from exc
    _expect_keys(
        doc,
        "instance",
        required={"schema_version", "name", "horizon_days", "shifts", "nurses",
                  "demand", "rules", "constraints"},
        optional={"provenance"},
    )
    version = _as_str(doc["schema_version"], "schema_version")
    if version != SCHEMA_VERSION:
        _fail("schema_version", f"unsupported version {version!r}, expected {SCHEMA_VERSION!r}")

    shifts = []
    for idx, entry in enumerate(_as_list(doc["shifts"], "shifts")):
        path = f"shifts[{idx}]"
        _expect_keys(entry, path, required={"id", "label"}, optional={"is_night"})
        shifts.append(
            ShiftType(
                id=_as_int(entry["id"], f"{path}.id", minimum=1),
                label=_as_str(entry["label"], f"{path}.label"),
                is_night=_as_bool(entry.get("is_night", False), f"{path}.is_night"),
            )
        )

    nurses = []
    for idx, entry in enumerate(_as_list(doc["nurses"], "nurses")):
        path = f"nurses[{idx}]"
        _expect_keys(
            entry,
            path,
            required={"id", "name", "unit_cost"},
            optional={"skill_tier", "required_shifts", "leave_days", "preferences"},
        )
        quotas = {}
        for q_idx, record in enumerate(_as_list(entry.get("required_shifts", []), f"{path}.required_shifts")):
            q_path = f"{path}.required_shifts[{q_idx}]"
            _expect_keys(record, q_path, required={"shift", "count"})
            shift = _as_int(record["shift"], f"{q_path}.shift", minimum=1)
            count = _as_int(record["count"], f"{q_path}.count", minimum=0)
            if shift in quotas:
                _fail(q_path, f"duplicate quota for shift {shift}")
            if count:
                quotas[shift] = count
        preferences = {}
        for p_idx, record in enumerate(_as_list(entry.get("preferences", []), f"{path}.preferences")):
            p_path = f"{path}.preferences[{p_idx}]"
            _expect_keys(record, p_path, required={"shift", "day", "reduction"})
            cell = (
                _as_int(record["shift"], f"{p_path}.shift", minimum=1),
                _as_int(record["day"], f"{p_path}.day", minimum=1),
            )
            if cell in preferences:
                _fail(p_path, f"duplicate preference for shift {cell[0]} day {cell[1]}")
            reduction = _as_int(record["reduction"], f"{p_path}.reduction", minimum=0)
            if reduction:
                preferences[cell] = reduction
        leave = [
            _as_int(day, f"{path}.leave_days[{l_idx}]", minimum=1)
            for l_idx, day in enumerate(_as_list(entry.get("leave_days", []), f"{path}.leave_days"))
        ]
        nurses.append(
            Nurse(
                id=_as_int(entry["id"], f"{path}.id", minimum=1),
                name=_as_str(entry["name"], f"{path}.name"),
                unit_cost=_as_int(entry["unit_cost"], f"{path}.unit_cost"),
                skill_tier=_as_int(entry.get("skill_tier", 0), f"{path}.skill_tier", minimum=0),
                required_shifts=quotas,
                leave_days=frozenset(leave),
                preferences=preferences,
            )
        )

    demand = {}
    for idx, record in enumerate(_as_list(doc["demand"], "demand")):
        path = f"demand[{idx}]"
        _expect_keys(record, path, required={"shift", "day", "count"}, optional={"tier"})
        cell = (
            _as_int(record["shift"], f"{path}.shift", minimum=1),
            _as_int(record["day"], f"{path}.day", minimum=1),
            _as_int(record.get("tier", 0), f"{path}.tier", minimum=0),
        )
        if cell in demand:
            _fail(path, f"duplicate demand cell {cell}")
        count = _as_int(record["count"], f"{path}.count", minimum=0)
        if count:
            demand[cell] = count

    rules_doc = doc["rules"]
    _expect_keys(
        rules_doc,
        "rules",
        required={"max_work_days", "consecutive_work_limit"},
        optional={"max_consecutive_nights", "rest_after_nights", "max_shift_type"},
    )
    max_shift_type = rules_doc.get("max_shift_type")
    rules = RuleParams(
        max_work_days=_as_int(rules_doc["max_work_days"], "rules.max_work_days"),
        consecutive_work_limit=_as_int(
            rules_doc["consecutive_work_limit"], "rules.consecutive_work_limit"
        ),
        max_consecutive_nights=_as_int(
            rules_doc.get("max_consecutive_nights", 2), "rules.max_consecutive_nights"
        ),
        rest_after_nights=_as_int(
            rules_doc.get("rest_after_nights", 1), "rules.rest_after_nights"
        ),
        max_shift_type=None
        if max_shift_type is None
        else _as_int(max_shift_type, "rules.max_shift_type"),
    )

    constraints = []
    for idx, record in enumerate(_as_list(doc["constraints"], "constraints")):
        path = f"constraints[{idx}]"
        _expect_keys(record, path, required={"family", "class", "penalty_weight"}, optional={"enabled"})
        constraints.append(
            ConstraintSpec(
                family=_as_str(record["family"], f"{path}.family"),
                severity=_as_str(record["class"], f"{path}.class"),
                penalty_weight=_as_int(record["penalty_weight"], f"{path}.penalty_weight"),
                enabled=_as_bool(record.get("enabled", True), f"{path}.enabled"),
            )
        )

    instance = Instance(
        name=_as_str(doc["name"], "name"),
        horizon_days=_as_int(doc["horizon_days"], "horizon_days", minimum=1),
        shifts=tuple(shifts),
        nurses=tuple(nurses),
        demand=demand,
        rules=rules,
        constraints=tuple(constraints),
        provenance=_as_str(doc.get("provenance", ""), "provenance"),
    )
    defects = validate_instance(instance)
    if defects:
        raise InstanceParseError("instance is structurally invalid: " + "; ".join(defects))
    return instance


def render_instance(instance: Instance) -> str:
    """Serialize an instance so that ``parse_instance`` round-trips it."""
    doc = {
        "schema_version": SCHEMA_VERSION,
        "name": instance.name,
        "horizon_days": instance.horizon_days,
        "shifts": [
            {"id": s.id, "label": s.label, "is_night": s.is_night} for s in instance.shifts
        ],
        "nurses": [
            {
                "id": n.id,
                "name": n.name,
                "unit_cost": n.unit_cost,
                "skill_tier": n.skill_tier,
                "required_shifts": [
                    {"shift": shift, "count": count}
                    for shift, count in sorted(n.required_shifts.items())
                    if count
                ],
                "leave_days": sorted(n.leave_days),
                "preferences": [
                    {"shift": shift, "day": day, "reduction": reduction}
                    for (shift, day), reduction in sorted(n.preferences.items())
                    if reduction
                ],
            }
            for n in instance.nurses
        ],
        "demand": [
            {"shift": shift, "day": day, "tier": tier, "count": count}
            for (shift, day, tier), count in sorted(instance.demand.items())
            if count
        ],
        "rules": {
            "max_work_days": instance.rules.max_work_days,
            "consecutive_work_limit": instance.rules.consecutive_work_limit,
            "max_consecutive_nights": instance.rules.max_consecutive_nights,
            "rest_after_nights": instance.rules.rest_after_nights,
            "max_shift_type": instance.rules.max_shift_type,
        },
        "constraints": [
            {
                "family": c.family,
                "class": c.severity,
                "penalty_weight": c.penalty_weight,
                "enabled": c.enabled,
            }
            for c in instance.constraints
        ],
        "provenance": instance.provenance,
    }
    return json.dumps(doc, indent=2) + "\n"


def load_instance(path: str) -> Instance:
    with open(path, encoding="utf-8") as handle:
        return parse_instance(handle.read())


def load_benchmark(name: str) -> Instance:
    """One of the embedded benchmark instances (:data:`BENCHMARKS`)."""
    if name not in BENCHMARKS:
        raise KeyError(f"unknown benchmark {name!r}; available: {', '.join(BENCHMARKS)}")
    text = resources.files("roster_forge.data").joinpath(f"{name}.roster.json").read_text("utf-8")
    return parse_instance(text)


def load_published_solution(name: str) -> Schedule:
    """The transcribed final roster published for a benchmark instance."""
    if name not in BENCHMARKS:
        raise KeyError(f"unknown benchmark {name!r}; available: {', '.join(BENCHMARKS)}")
    instance = load_benchmark(name)
    text = resources.files("roster_forge.data").joinpath(f"{name}_published.csv").read_text("utf-8")
    return parse_schedule_csv(text, instance)


# -- schedule round-trip -----------------------------------------------------


def render_schedule_csv(schedule: Schedule) -> str:
    """Dense CSV, one row per cell, nurse-major then day then shift."""
    buffer = _stdio.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(SCHEDULE_CSV_COLUMNS)
    n_count, s_count, d_count = schedule.x.shape
    for nurse in range(1, n_count + 1):
        for day in range(1, d_count + 1):
            for shift in range(1, s_count + 1):
                writer.writerow([nurse, day, shift, schedule.get(nurse, shift, day)])
    return buffer.getvalue()


def parse_schedule_csv(text: str, instance: Instance) -> Schedule:
    reader = csv.reader(_stdio.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ScheduleParseError("empty schedule file") from None
    if tuple(header) != SCHEDULE_CSV_COLUMNS:
        raise ScheduleParseError(
            f"bad header {header!r}, expected {','.join(SCHEDULE_CSV_COLUMNS)}"
        )
    shape = (len(instance.nurses), len(instance.shifts), instance.horizon_days)
    tensor = np.full(shape, -1, dtype=np.int8)
    for line_no, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 4:
            raise ScheduleParseError(f"line {line_no}: expected 4 columns, got {len(row)}")
        try:
            nurse, day, shift, assigned = (int(cell) for cell in row)
        except ValueError:
            raise ScheduleParseError(f"line {line_no}: non-integer cell in {row!r}") from None
        if not (1 <= nurse <= shape[0] and 1 <= shift <= shape[1] and 1 <= day <= shape[2]):
            raise ScheduleParseError(
                f"line {line_no}: cell (nurse={nurse}, shift={shift}, day={day}) outside "
                f"{shape[0]}x{shape[1]}x{shape[2]} instance"
            )
        if assigned not in (0, 1):
            raise ScheduleParseError(f"line {line_no}: assigned must be 0 or 1, got {assigned}")
        if tensor[nurse - 1, shift - 1, day - 1] != -1:
            raise ScheduleParseError(f"line {line_no}: duplicate cell ({nurse}, {shift}, {day})")
        tensor[nurse - 1, shift - 1, day - 1] = assigned
    if (tensor == -1).any():
        missing = int((tensor == -1).sum())
        raise ScheduleParseError(f"schedule is missing {missing} cells for this instance")
    return Schedule(instance, tensor)


def schedule_to_json_dict(schedule: Schedule) -> dict:
    n_count, s_count, d_count = schedule.x.shape
    return {
        "nurses": n_count,
        "shifts": s_count,
        "days": d_count,
        "tensor": schedule.x.tolist(),
    }


def parse_schedule_json(text: str, instance: Instance) -> Schedule:
    """Accepts either a bare schedule object or a full rendered result."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScheduleParseError(f"not valid JSON: {exc}") from exc
    if isinstance(doc, dict) and "schedule" in doc:
        doc = doc["schedule"]
    if not isinstance(doc, dict) or "tensor" not in doc:
        raise ScheduleParseError("expected an object with a 'tensor' field")
    try:
        return Schedule(instance, np.asarray(doc["tensor"], dtype=np.int8))
    except ValueError as exc:
        raise ScheduleParseError(str(exc)) from exc


def load_schedule(path: str, instance: Instance) -> Schedule:
    with open(path, encoding="utf-8") as handle:
        text = handle.read()
    if path.endswith(".json"):
        return parse_schedule_json(text, instance)
    return parse_schedule_csv(text, instance)


# -- human/machine rendering of results --------------------------------------


def breakdown_to_dict(breakdown: CostBreakdown) -> dict:
    return {
        "base_cost": breakdown.base_cost,
        "preference_reduction": breakdown.preference_reduction,
        "penalties": dict(breakdown.penalties),
        "hard_penalty": breakdown.hard_penalty,
        "soft_penalty": breakdown.soft_penalty,
        "total": breakdown.total,
    }


def result_to_json_dict(result: SolveResult) -> dict:
    return {
        "instance": result.schedule.instance.name,
        "feasible": result.feasible,
        "converged": result.converged,
        "iterations": result.iterations,
        "wall_time_ms": result.wall_time * 1000.0,
        "breakdown": breakdown_to_dict(result.breakdown),
        "schedule": schedule_to_json_dict(result.schedule),
        "trace": result.trace.to_dicts(),
    }


def render_roster_table(
    schedule: Schedule,
    breakdown: CostBreakdown | None = None,
    model: CostModel | None = None,
) -> str:
    """Figure-style table: nurses as rows, day x shift columns, a trailing
    per-nurse penalty column, and a footer with the cost breakdown."""
    instance = schedule.instance
    model = model or CostModel(instance)
    breakdown = breakdown or model.evaluate(schedule)
    violations = model.violations(schedule)
    per_nurse = {nurse.id: 0 for nurse in instance.nurses}
    unattributed = 0
    for violation in violations:
        if violation.nurse is not None:
            per_nurse[violation.nurse] += violation.penalty
        else:
            unattributed += violation.penalty

    columns = [
        (day, shift.id, f"d{day}.{shift.label}")
        for day in range(1, instance.horizon_days + 1)
        for shift in instance.shifts
    ]
    name_width = max(len("nurse"), max((len(n.name) for n in instance.nurses), default=5))
    cost_width = max(len("cost"), max((len(str(n.unit_cost)) for n in instance.nurses), default=4))
    col_width = max(len(label) for (_, _, label) in columns) if columns else 4
    pen_width = max(len("penalty"), *(len(str(v)) for v in list(per_nurse.values()) + [0]))

    lines = []
    header = (
        f"{'nurse':<{name_width}}  {'cost':>{cost_width}}  "
        + "  ".join(f"{label:>{col_width}}" for (_, _, label) in columns)
        + f"  {'penalty':>{pen_width}}"
    )
    lines.append(header)
    lines.append("-" * len(header))
    for nurse in instance.nurses:
        cells = "  ".join(
            f"{schedule.get(nurse.id, shift, day):>{col_width}}" for (day, shift, _) in columns
        )
        lines.append(
            f"{nurse.name:<{name_width}}  {nurse.unit_cost:>{cost_width}}  {cells}"
            f"  {per_nurse[nurse.id]:>{pen_width}}"
        )
    lines.append("-" * len(header))
    coverage_cells = "  ".join(
        f"{int(schedule.x[:, shift - 1, day - 1].sum()):>{col_width}}"
        for (day, shift, _) in columns
    )
    demand_cells = "  ".join(
        f"{instance.pooled_demand(shift, day):>{col_width}}" for (day, shift, _) in columns
    )
    lines.append(f"{'covered':<{name_width}}  {'':>{cost_width}}  {coverage_cells}")
    lines.append(f"{'demand':<{name_width}}  {'':>{cost_width}}  {demand_cells}")
    lines.append("")
    lines.append(f"base cost            {breakdown.base_cost}")
    lines.append(f"preference reduction {breakdown.preference_reduction}")
    lines.append(f"soft penalty         {breakdown.soft_penalty}")
    lines.append(f"hard penalty         {breakdown.hard_penalty}")
    if unattributed:
        lines.append(f"coverage penalties   {unattributed}")
    lines.append(f"total                {breakdown.total}")
    return "\n".join(lines) + "\n"


def render_schedule(result: SolveResult, format: str = "table", model: CostModel | None = None) -> str:
    """Render a solve result as ``table`` (human), ``csv`` (dense cells), or
    ``json`` (full result including breakdown and trace)."""
    if format == "table":
        return render_roster_table(result.schedule, result.breakdown, model)
    if format == "csv":
        return render_schedule_csv(result.schedule)
    if format == "json":
        return json.dumps(result_to_json_dict(result), indent=2) + "\n"
    raise ValueError(f"unknown schedule format {format!r}")


def render_violations(violations: list[Violation]) -> str:
    if not violations:
        return "no violations\n"
    lines = [
        f"{violation.family} {violation.locus()} magnitude={violation.magnitude} "
        f"penalty={violation.penalty}"
        for violation in violations
    ]
    return "\n".join(lines) + "\n"
