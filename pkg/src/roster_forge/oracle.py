"""Exhaustive search over tiny instances, used to measure the heuristic's gap.

The search enumerates every binary assignment tensor depth-first in
lexicographic cell order (day, then shift, then nurse; zero branch first),
keeping an exact running total through incremental deltas.  Pruning uses an
admissible lower bound built from the base-cost suffix, unavoidable pooled
coverage shortfall, already-locked over-coverage, and unavoidable duty-quota
deviation, so the pruned search returns exactly what plain enumeration
would: the minimum total with the lexicographically smallest tensor.

Single-threaded per invocation; invocations are independent.
"""

from __future__ import annotations

from dataclasses import dataclass

from .cost import CostModel
from .model import Instance, InstanceValidationError, Schedule, validate_instance
from .solver import SolverConfig, solve


class OracleLimitError(ValueError):
    """The instance exceeds the configured exhaustive-search cap."""


@dataclass(frozen=True)
class OracleLimits:
    """``max_cells`` caps nurses x shifts x days; raise it deliberately for
    offline runs.  ``prune=False`` forces plain full enumeration."""

    max_cells: int = 24
    prune: bool = True


@dataclass
class OracleResult:
    optimal_cost: int
    optimal_schedule: Schedule
    nodes_explored: int
    proven_optimal: bool


@dataclass(frozen=True)
class GapReport:
    heuristic_cost: int
    optimal_cost: int
    relative_gap: float


def solve_exact(instance: Instance, limits: OracleLimits | None = None) -> OracleResult:
    """Provably optimal schedule for an instance within the cell cap."""
    limits = limits or OracleLimits()
    defects = validate_instance(instance)
    if defects:
        raise InstanceValidationError(defects)
    cell_count = len(instance.nurses) * len(instance.shifts) * instance.horizon_days
    if cell_count > limits.max_cells:
        raise OracleLimitError(
            f"{cell_count} cells exceed the exhaustive-search cap of {limits.max_cells}; "
            "pass explicit OracleLimits to override"
        )

    model = CostModel(instance)
    schedule = Schedule(instance)
    cells = [
        (nurse.id, shift.id, day)
        for day in range(1, instance.horizon_days + 1)
        for shift in instance.shifts
        for nurse in instance.nurses
    ]

    w_short = model.weights.get("C8", 0)
    w_excess = model.weights.get("C7", 0)
    w_quota = model.weights.get("C10", 0)

    col_demand = {
        (shift.id, day): instance.pooled_demand(shift.id, day)
        for shift in instance.shifts
        for day in range(1, instance.horizon_days + 1)
    }
    col_assigned = {key: 0 for key in col_demand}
    col_undecided = {key: len(instance.nurses) for key in col_demand}
    quota_expected = {
        (nurse.id, shift.id): nurse.quota(shift.id)
        for nurse in instance.nurses
        for shift in instance.shifts
    }
    quota_count = {key: 0 for key in quota_expected}
    quota_undecided = {key: instance.horizon_days for key in quota_expected}

    net_costs = [
        instance.nurse_by_id(n).unit_cost - instance.nurse_by_id(n).preferences.get((s, d), 0)
        for (n, s, d) in cells
    ]
    gains = [min(0, net) for net in net_costs]
    suffix_gain = [0] * (len(cells) + 1)
    for k in range(len(cells) - 1, -1, -1):
        suffix_gain[k] = suffix_gain[k + 1] + gains[k]

    def col_shortfall(col: tuple[int, int]) -> int:
        return max(0, col_demand[col] - col_assigned[col] - col_undecided[col])

    def col_excess(col: tuple[int, int]) -> int:
        return max(0, col_assigned[col] - col_demand[col])

    def quota_dev(key: tuple[int, int]) -> int:
        count, expected = quota_count[key], quota_expected[key]
        return max(0, count - expected, expected - count - quota_undecided[key])

    state = {
        "short_sum": 0,
        "excess_sum": 0,
        "quota_sum": 0,
        "base_net": 0,
        "nodes": 0,
        "best_total": None,
        "best_tensor": None,
    }

    def decide(cell_index: int, value: int) -> None:
        nurse_id, shift, day = cells[cell_index]
        col, key = (shift, day), (nurse_id, shift)
        state["short_sum"] -= col_shortfall(col)
        state["excess_sum"] -= col_excess(col)
        state["quota_sum"] -= quota_dev(key)
        col_undecided[col] -= 1
        quota_undecided[key] -= 1
        if value:
            col_assigned[col] += 1
            quota_count[key] += 1
            state["base_net"] += net_costs[cell_index]
        state["short_sum"] += col_shortfall(col)
        state["excess_sum"] += col_excess(col)
        state["quota_sum"] += quota_dev(key)

    def undo(cell_index: int, value: int) -> None:
        nurse_id, shift, day = cells[cell_index]
        col, key = (shift, day), (nurse_id, shift)
        state["short_sum"] -= col_shortfall(col)
        state["excess_sum"] -= col_excess(col)
        state["quota_sum"] -= quota_dev(key)
        col_undecided[col] += 1
        quota_undecided[key] += 1
        if value:
            col_assigned[col] -= 1
            quota_count[key] -= 1
            state["base_net"] -= net_costs[cell_index]
        state["short_sum"] += col_shortfall(col)
        state["excess_sum"] += col_excess(col)
        state["quota_sum"] += quota_dev(key)

    def bound(next_index: int) -> int:
        return (
            state["base_net"]
            + suffix_gain[next_index]
            + w_short * state["short_sum"]
            + w_excess * state["excess_sum"]
            + w_quota * state["quota_sum"]
        )

    def descend(cell_index: int, running_total: int) -> None:
        state["nodes"] += 1
        if cell_index == len(cells):
            if state["best_total"] is None or running_total < state["best_total"]:
                state["best_total"] = running_total
                state["best_tensor"] = schedule.x.copy()
            return
        nurse_id, shift, day = cells[cell_index]
        for value in (0, 1):
            delta = 0
            if value:
                delta = model.delta(schedule, nurse_id, shift, day, 1)
                schedule.set(nurse_id, shift, day, 1)
            decide(cell_index, value)
            prunable = (
                limits.prune
                and state["best_total"] is not None
                and bound(cell_index + 1) >= state["best_total"]
            )
            if not prunable:
                descend(cell_index + 1, running_total + delta)
            undo(cell_index, value)
            if value:
                schedule.set(nurse_id, shift, day, 0)

    # Deltas accumulate from the empty schedule, so seed the running total
    # with its true cost to keep leaf totals absolute.
    descend(0, model.evaluate(schedule).total)
    return OracleResult(
        optimal_cost=state["best_total"],
        optimal_schedule=Schedule(instance, state["best_tensor"]),
        nodes_explored=state["nodes"],
        proven_optimal=True,
    )


def gap_report(instance: Instance, limits: OracleLimits | None = None) -> GapReport:
    """Heuristic-versus-optimal comparison on one oracle-sized instance.

    Both sides price with the instance's own catalogue weights, so the
    heuristic total can never undercut the optimum.
    """
    heuristic = solve(instance, SolverConfig())
    exact = solve_exact(instance, limits)
    heuristic_cost = heuristic.breakdown.total
    gap = (heuristic_cost - exact.optimal_cost) / max(1, exact.optimal_cost)
    return GapReport(
        heuristic_cost=heuristic_cost,
        optimal_cost=exact.optimal_cost,
        relative_gap=gap,
    )
