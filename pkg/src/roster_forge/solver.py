"""Deterministic greedy constructive search with over-assignment repair.

The search runs in two layers ordered by penalty weight: first a coverage
layer that repeatedly targets the most under-staffed position and assigns
the nurse giving the greatest cost drop, then a soft layer of steepest-
descent moves (remove / add / relocate single assignments) that only ever
applies strictly improving changes.  There is no randomness anywhere:
identical inputs produce identical results, trace included.

``solve`` is single-threaded per invocation; concurrent calls on distinct
instances share nothing.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from typing import Iterable, Union

from .cost import CostBreakdown, CostModel
from .model import (
    Instance,
    InstanceValidationError,
    Schedule,
    new_empty_schedule,
    validate_instance,
)

log = logging.getLogger(__name__)

GREATEST_DROP = "greatest-drop"
PAPER_3B = "paper-3b"
SELECTION_MODES = (GREATEST_DROP, PAPER_3B)


@dataclass(frozen=True, order=True)
class Position:
    """An open slot in the roster; field order is the tie-break order."""

    day: int
    shift: int
    tier: int

    def __iter__(self):
        return iter((self.day, self.shift, self.tier))


@dataclass(frozen=True)
class ImbalancePicked:
    position: Position
    shortfall: int


@dataclass(frozen=True)
class Assigned:
    nurse: int
    position: Position
    delta: int


@dataclass(frozen=True)
class RemovedOverAssigned:
    nurse: int
    position: Position
    reason: str


@dataclass(frozen=True)
class Terminated:
    reason: str


TraceEvent = Union[ImbalancePicked, Assigned, RemovedOverAssigned, Terminated]


@dataclass(frozen=True)
class SolveTrace:
    """Ordered event log of every heuristic decision.

    Replaying the Assigned/Removed events from an empty schedule reproduces
    the solver's final schedule exactly.
    """

    events: tuple[TraceEvent, ...] = ()

    def replay(self, instance: Instance) -> Schedule:
        schedule = new_empty_schedule(instance)
        for event in self.events:
            if isinstance(event, Assigned):
                schedule.set(event.nurse, event.position.shift, event.position.day, 1)
            elif isinstance(event, RemovedOverAssigned):
                schedule.set(event.nurse, event.position.shift, event.position.day, 0)
        return schedule

    def to_dicts(self) -> list[dict]:
        out = []
        for event in self.events:
            if isinstance(event, ImbalancePicked):
                out.append(
                    {
                        "event": "imbalance_picked",
                        "position": list(event.position),
                        "shortfall": event.shortfall,
                    }
                )
            elif isinstance(event, Assigned):
                out.append(
                    {
                        "event": "assigned",
                        "nurse": event.nurse,
                        "position": list(event.position),
                        "delta": event.delta,
                    }
                )
            elif isinstance(event, RemovedOverAssigned):
                out.append(
                    {
                        "event": "removed",
                        "nurse": event.nurse,
                        "position": list(event.position),
                        "reason": event.reason,
                    }
                )
            else:
                out.append({"event": "terminated", "reason": event.reason})
        return out


@dataclass(frozen=True)
class SolverConfig:
    """Knobs of the search. ``selection`` picks between the default
    greatest-cost-drop rule and the literal highest-unit-cost rule kept for
    comparison. Weight overrides, when set, re-price the instance catalogue.
    The search is seedless by construction."""

    selection: str = GREATEST_DROP
    max_iterations: int | None = None
    hard_weight: int | None = None
    shortfall_weight: int | None = None
    excess_weight: int | None = None

    def iteration_cap(self, instance: Instance) -> int:
        if self.max_iterations is not None:
            return self.max_iterations
        return 10 * len(instance.nurses) * len(instance.shifts) * instance.horizon_days

    def cost_model(self, instance: Instance) -> CostModel:
        return CostModel(
            instance,
            hard_weight=self.hard_weight,
            shortfall_weight=self.shortfall_weight,
            excess_weight=self.excess_weight,
        )


@dataclass
class SolveResult:
    schedule: Schedule
    breakdown: CostBreakdown
    trace: SolveTrace
    feasible: bool
    converged: bool
    iterations: int
    wall_time: float


def open_positions(schedule: Schedule, model: CostModel | None = None) -> list[tuple[int, Position]]:
    """All under-staffed positions as (shortfall, position), sorted by
    descending shortfall then (day, shift, tier)."""
    model = model or CostModel(schedule.instance)
    instance = schedule.instance
    found: list[tuple[int, Position]] = []
    for day in range(1, instance.horizon_days + 1):
        for shift in instance.shifts:
            supply = model.cell_supply(schedule, shift.id, day)
            for tier, shortfall in model.cell_shortfalls(supply, shift.id, day).items():
                found.append((shortfall, Position(day=day, shift=shift.id, tier=tier)))
    found.sort(key=lambda item: (-item[0], item[1]))
    return found


def find_most_imbalanced(schedule: Schedule, model: CostModel | None = None) -> Position | None:
    """The open position with the largest shortfall, ties broken by earliest
    day, lowest shift id, lowest tier; None when coverage is met everywhere."""
    opens = open_positions(schedule, model)
    return opens[0][1] if opens else None


def _is_eligible(
    model: CostModel, schedule: Schedule, position: Position, nurse_id: int
) -> bool:
    """Hard-family gates only; soft families are priced by the delta instead."""
    nurse = schedule.instance.nurse_by_id(nurse_id)
    if nurse.skill_tier < position.tier:
        return False
    if schedule.get(nurse_id, position.shift, position.day):
        return False
    hard = model.hard_families()
    if "C5" in hard and position.day in nurse.leave_days:
        return False
    if "C1" in hard and schedule.day_load(nurse_id, position.day) > 0:
        return False
    if "C6" in hard and model.night_id is not None:
        night, morning = model.night_id, model.morning_id
        if position.shift == morning and position.day > 1:
            if schedule.get(nurse_id, night, position.day - 1):
                return False
        if position.shift == night and position.day < schedule.instance.horizon_days:
            if schedule.get(nurse_id, morning, position.day + 1):
                return False
    if "C10" in hard:
        if schedule.shift_count(nurse_id, position.shift) >= nurse.quota(position.shift):
            return False
    return True


def _candidates(
    model: CostModel,
    schedule: Schedule,
    position: Position,
    tabu: Iterable[tuple[int, Position]] = (),
) -> list[int]:
    blocked = set(tabu)
    return [
        nurse.id
        for nurse in schedule.instance.nurses
        if (nurse.id, position) not in blocked
        and _is_eligible(model, schedule, position, nurse.id)
    ]


def select_nurse(
    schedule: Schedule,
    position: Position,
    model: CostModel | None = None,
    tabu: Iterable[tuple[int, Position]] = (),
) -> int | None:
    """The eligible nurse whose assignment drops total cost the most, ties
    broken by lowest id; None when no eligible assignment improves."""
    model = model or CostModel(schedule.instance)
    best: tuple[int, int] | None = None
    for nurse_id in _candidates(model, schedule, position, tabu):
        delta = model.delta(schedule, nurse_id, position.shift, position.day, 1)
        if delta < 0 and (best is None or (delta, nurse_id) < best):
            best = (delta, nurse_id)
    return best[1] if best else None


def _select(
    model: CostModel,
    schedule: Schedule,
    position: Position,
    tabu: set[tuple[int, Position]],
    selection: str,
) -> tuple[int, int] | None:
    """Internal selection honouring the configured rule; returns
    (nurse, delta) or None."""
    candidates = _candidates(model, schedule, position, tabu)
    if not candidates:
        return None
    if selection == PAPER_3B:
        nurse_id = min(
            candidates, key=lambda n: (-schedule.instance.nurse_by_id(n).unit_cost, n)
        )
        return nurse_id, model.delta(schedule, nurse_id, position.shift, position.day, 1)
    best: tuple[int, int] | None = None
    for nurse_id in candidates:
        delta = model.delta(schedule, nurse_id, position.shift, position.day, 1)
        if delta < 0 and (best is None or (delta, nurse_id) < best):
            best = (delta, nurse_id)
    if best is None:
        return None
    return best[1], best[0]


def repair_over_assignment(
    schedule: Schedule,
    nurse_id: int,
    position: Position,
    model: CostModel | None = None,
) -> list[RemovedOverAssigned]:
    """Undo over-assignment created by the assignment just made at
    ``position``: first per-nurse caps (same-day, work-day total, duty
    quota), then shift over-coverage, where the cheapest nurse on the shift
    is unassigned.  Caps are enforced for hard families only; soft caps are
    already priced into the selection delta.  Removals are applied to the
    schedule and returned."""
    model = model or CostModel(schedule.instance)
    instance = schedule.instance
    nurse = instance.nurse_by_id(nurse_id)
    removals: list[RemovedOverAssigned] = []
    hard = model.hard_families()
    day, shift = position.day, position.shift

    def remove(target_nurse: int, target_shift: int, target_day: int, reason: str) -> None:
        schedule.set(target_nurse, target_shift, target_day, 0)
        tier = instance.nurse_by_id(target_nurse).skill_tier
        removals.append(
            RemovedOverAssigned(
                target_nurse,
                Position(day=target_day, shift=target_shift, tier=tier),
                reason,
            )
        )

    if "C1" in hard and schedule.day_load(nurse_id, day) > 1:
        for other_shift in range(1, len(instance.shifts) + 1):
            if other_shift != shift and schedule.get(nurse_id, other_shift, day):
                remove(nurse_id, other_shift, day, "same-day-cap")
    if "C2" in hard and schedule.x[nurse_id - 1].sum() > instance.rules.max_work_days:
        for other_day in range(1, instance.horizon_days + 1):
            for other_shift in range(1, len(instance.shifts) + 1):
                if (other_day, other_shift) != (day, shift) and schedule.get(
                    nurse_id, other_shift, other_day
                ):
                    remove(nurse_id, other_shift, other_day, "work-day-cap")
                    break
            else:
                continue
            break
    if "C10" in hard and schedule.shift_count(nurse_id, shift) > nurse.quota(shift):
        for other_day in range(1, instance.horizon_days + 1):
            if other_day != day and schedule.get(nurse_id, shift, other_day):
                remove(nurse_id, shift, other_day, "duty-quota-cap")
                break

    if model.enabled("C7"):
        supply = model.cell_supply(schedule, shift, day)
        excess = sum(supply.values()) - instance.pooled_demand(shift, day)
        if excess > 0:
            on_shift = [
                n.id for n in instance.nurses if schedule.get(n.id, shift, day)
            ]
            victim = min(on_shift, key=lambda n: (instance.nurse_by_id(n).unit_cost, n))
            remove(victim, shift, day, "over-coverage")
    return removals


# -- soft improvement layer --------------------------------------------------

_REMOVE, _ADD, _RELOCATE = 0, 1, 2


def _best_move(model: CostModel, schedule: Schedule):
    """Most improving single move as (delta, kind, key, actions) or None.

    Moves are ranked by delta, then kind (remove before add before
    relocate), then lexicographic key, which keeps the sweep deterministic
    and guarantees a chosen relocation beats both of its halves.
    """
    instance = schedule.instance
    best = None

    def consider(candidate):
        nonlocal best
        if candidate[0] < 0 and (best is None or candidate[:3] < best[:3]):
            best = candidate

    assigned = list(schedule.assignments())
    for nurse_id, shift, day in assigned:
        delta = model.delta(schedule, nurse_id, shift, day, 0)
        consider((delta, _REMOVE, (nurse_id, shift, day), [(nurse_id, shift, day, 0)]))

    empties = [
        (nurse.id, shift.id, day)
        for nurse in instance.nurses
        for shift in instance.shifts
        for day in range(1, instance.horizon_days + 1)
        if not schedule.get(nurse.id, shift.id, day)
    ]
    for nurse_id, shift, day in empties:
        delta = model.delta(schedule, nurse_id, shift, day, 1)
        consider((delta, _ADD, (nurse_id, shift, day), [(nurse_id, shift, day, 1)]))

    for nurse_id, shift, day in assigned:
        removal_delta = model.delta(schedule, nurse_id, shift, day, 0)
        schedule.set(nurse_id, shift, day, 0)
        try:
            for target_shift in range(1, len(instance.shifts) + 1):
                for target_day in range(1, instance.horizon_days + 1):
                    if (target_shift, target_day) == (shift, day):
                        continue
                    if schedule.get(nurse_id, target_shift, target_day):
                        continue
                    add_delta = model.delta(schedule, nurse_id, target_shift, target_day, 1)
                    consider(
                        (
                            removal_delta + add_delta,
                            _RELOCATE,
                            (nurse_id, shift, day, target_shift, target_day),
                            [
                                (nurse_id, shift, day, 0),
                                (nurse_id, target_shift, target_day, 1),
                            ],
                        )
                    )
        finally:
            schedule.set(nurse_id, shift, day, 1)
    return best


def solve(instance: Instance, config: SolverConfig | None = None) -> SolveResult:
    """Run the full two-layer search on a validated instance.

    Deterministic for fixed inputs; halts within the iteration cap and
    flags the result ``converged=False`` if the cap fires first.
    """
    config = config or SolverConfig()
    if config.selection not in SELECTION_MODES:
        raise ValueError(f"unknown selection mode {config.selection!r}")
    defects = validate_instance(instance)
    if defects:
        raise InstanceValidationError(defects)

    model = config.cost_model(instance)
    schedule = Schedule(instance)
    events: list[TraceEvent] = []
    cap = config.iteration_cap(instance)
    iterations = 0
    started = time.perf_counter()
    reason = "search-exhausted"

    # Layer 1: drive coverage shortfall to zero, hardest positions first.
    tabu: set[tuple[int, Position]] = set()
    while True:
        if iterations >= cap:
            reason = "iteration-cap"
            break
        opens = open_positions(schedule, model)
        if not opens:
            break
        iterations += 1
        top_shortfall, top_position = opens[0]
        events.append(ImbalancePicked(top_position, top_shortfall))
        chosen = None
        for _, position in opens:
            picked = _select(model, schedule, position, tabu, config.selection)
            if picked is not None:
                chosen = (position, picked)
                break
        if chosen is None:
            reason = "no-eligible-assignment"
            break
        position, (nurse_id, delta) = chosen
        schedule.set(nurse_id, position.shift, position.day, 1)
        events.append(Assigned(nurse_id, position, delta))
        log.debug("assign nurse=%d pos=%s delta=%d", nurse_id, position, delta)
        if delta >= 0:
            # Step back: the assignment did not reduce the objective.
            schedule.set(nurse_id, position.shift, position.day, 0)
            events.append(RemovedOverAssigned(nurse_id, position, "objective-not-reduced"))
            tabu.add((nurse_id, position))
            continue
        for removal in repair_over_assignment(schedule, nurse_id, position, model):
            events.append(removal)
            tabu.add((removal.nurse, removal.position))
            log.debug("repair removed nurse=%d pos=%s (%s)", removal.nurse, removal.position, removal.reason)

    # Layer 2: steepest-descent cleanup of the soft families.
    while reason == "search-exhausted":
        if iterations >= cap:
            reason = "iteration-cap"
            break
        move = _best_move(model, schedule)
        if move is None:
            break
        iterations += 1
        for nurse_id, shift, day, value in move[3]:
            actual = model.delta(schedule, nurse_id, shift, day, value)
            schedule.set(nurse_id, shift, day, value)
            position = Position(day=day, shift=shift, tier=instance.nurse_by_id(nurse_id).skill_tier)
            if value:
                events.append(Assigned(nurse_id, position, actual))
            else:
                events.append(RemovedOverAssigned(nurse_id, position, "improvement-move"))

    events.append(Terminated(reason))
    breakdown = model.evaluate(schedule)
    elapsed = time.perf_counter() - started
    result = SolveResult(
        schedule=schedule,
        breakdown=breakdown,
        trace=SolveTrace(tuple(events)),
        feasible=breakdown.hard_penalty == 0,
        converged=reason != "iteration-cap",
        iterations=iterations,
        wall_time=elapsed,
    )
    log.info(
        "solve %s: total=%d feasible=%s iterations=%d wall=%.3fs",
        instance.name,
        breakdown.total,
        result.feasible,
        iterations,
        elapsed,
    )
    return result
