"""Cost-based nurse rostering: penalized constraint evaluation, a
deterministic greedy constructive solver, and an exact branch-and-bound
oracle for tiny instances, plus the two embedded benchmark rosters."""

from .cost import (
    CostBreakdown,
    CostModel,
    Violation,
    check_consecutive_work,
    check_coverage,
    check_leave,
    check_max_work_days,
    check_night_morning,
    check_night_rest,
    check_one_shift_per_day,
    check_required_shifts,
    delta_evaluate,
    evaluate,
)
from .generate import random_instance
from .io import (
    BENCHMARKS,
    InstanceParseError,
    ScheduleParseError,
    load_benchmark,
    load_instance,
    load_published_solution,
    load_schedule,
    parse_instance,
    parse_schedule_csv,
    render_instance,
    render_schedule,
    render_schedule_csv,
)
from .model import (
    ConstraintSpec,
    Instance,
    InstanceValidationError,
    Nurse,
    RuleParams,
    Schedule,
    ShiftType,
    coverage,
    new_empty_schedule,
    validate_instance,
)
from .oracle import (
    GapReport,
    OracleLimitError,
    OracleLimits,
    OracleResult,
    gap_report,
    solve_exact,
)
from .solver import (
    Assigned,
    ImbalancePicked,
    Position,
    RemovedOverAssigned,
    SolveResult,
    SolveTrace,
    SolverConfig,
    Terminated,
    find_most_imbalanced,
    open_positions,
    repair_over_assignment,
    select_nurse,
    solve,
)

__version__ = "0.1.0"

__all__ = [
    "Assigned",
    "BENCHMARKS",
    "ConstraintSpec",
    "CostBreakdown",
    "CostModel",
    "GapReport",
    "ImbalancePicked",
    "Instance",
    "InstanceParseError",
    "InstanceValidationError",
    "Nurse",
    "OracleLimitError",
    "OracleLimits",
    "OracleResult",
    "Position",
    "RemovedOverAssigned",
    "RuleParams",
    "Schedule",
    "ScheduleParseError",
    "ShiftType",
    "SolveResult",
    "SolveTrace",
    "SolverConfig",
    "Terminated",
    "Violation",
    "check_consecutive_work",
    "check_coverage",
    "check_leave",
    "check_max_work_days",
    "check_night_morning",
    "check_night_rest",
    "check_one_shift_per_day",
    "check_required_shifts",
    "coverage",
    "delta_evaluate",
    "evaluate",
    "find_most_imbalanced",
    "gap_report",
    "load_benchmark",
    "load_instance",
    "load_published_solution",
    "load_schedule",
    "new_empty_schedule",
    "open_positions",
    "parse_instance",
    "parse_schedule_csv",
    "random_instance",
    "render_instance",
    "render_schedule",
    "render_schedule_csv",
    "repair_over_assignment",
    "select_nurse",
    "solve",
    "solve_exact",
    "validate_instance",
]
