"""Domain types for rostering instances, schedules, and the constraint catalogue.

All types here are plain value data and safe to share across threads once
built.  The one exception is :class:`Schedule`, whose tensor is mutated by a
single solver thread at a time; it does no internal locking.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Mapping

import numpy as np

HARD = "hard"
SOFT = "soft"

CONSTRAINT_FAMILIES = tuple(f"C{i}" for i in range(1, 11))

#: What each constraint family enforces, for reports and defect messages.
FAMILY_SUMMARY = {
    "C1": "at most one shift per nurse per day",
    "C2": "total assignments per nurse capped at the work-day limit",
    "C3": "no work streak longer than the consecutive-day limit",
    "C4": "rest block required after a run of night shifts",
    "C5": "no assignments on requested leave days",
    "C6": "a night shift must not be followed by a morning shift",
    "C7": "coverage must not exceed demand",
    "C8": "coverage must meet demand",
    "C9": "surplus senior cover stands in one tier down",
    "C10": "per-shift duty quotas must be met exactly",
}


class InstanceValidationError(ValueError):
    """An instance failed structural validation."""

    def __init__(self, defects: list[str]):
        super().__init__("invalid instance: " + "; ".join(defects))
        self.defects = list(defects)


@dataclass(frozen=True)
class ShiftType:
    """One shift of the day. Ids are 1-based and contiguous; at most one
    shift per instance may be flagged as the night shift."""

    id: int
    label: str
    is_night: bool = False


@dataclass(frozen=True)
class RuleParams:
    """Work-rule parameters shared by the whole instance.

    ``max_shift_type`` (a per-shift-type day cap) is carried for
    completeness but both benchmark instances realise that limit through
    exact duty quotas instead.
    """

    max_work_days: int
    consecutive_work_limit: int
    max_consecutive_nights: int = 2
    rest_after_nights: int = 1
    max_shift_type: int | None = None


@dataclass(frozen=True)
class ConstraintSpec:
    """Catalogue entry for one constraint family (C1..C10)."""

    family: str
    severity: str  # "hard" | "soft"
    penalty_weight: int
    enabled: bool = True


@dataclass
class Nurse:
    """A nurse with a flat per-assignment cost and per-shift duty quotas.

    ``required_shifts`` maps shift id to the exact number of duties of that
    shift the nurse must work over the horizon (missing ids mean zero).
    ``preferences`` maps (shift id, day) to a cost reduction earned when the
    nurse is assigned there.  ``skill_tier`` is 0 for regular nurses; higher
    tiers may stand in one tier down for coverage purposes.
    """

    id: int
    name: str
    unit_cost: int
    skill_tier: int = 0
    required_shifts: Mapping[int, int] = field(default_factory=dict)
    leave_days: frozenset[int] = frozenset()
    preferences: Mapping[tuple[int, int], int] = field(default_factory=dict)

    def quota(self, shift_id: int) -> int:
        return self.required_shifts.get(shift_id, 0)


@dataclass
class Instance:
    """Complete problem definition.

    ``demand`` maps (shift id, day, skill tier) to the required head count;
    entries with zero count are omitted.  Days are 1-based throughout.
    """

    name: str
    horizon_days: int
    shifts: tuple[ShiftType, ...]
    nurses: tuple[Nurse, ...]
    demand: Mapping[tuple[int, int, int], int]
    rules: RuleParams
    constraints: tuple[ConstraintSpec, ...]
    provenance: str = ""

    @cached_property
    def night_shift_id(self) -> int | None:
        for shift in self.shifts:
            if shift.is_night:
                return shift.id
        return None

    @cached_property
    def tiers(self) -> tuple[int, ...]:
        """All skill tiers present among nurses or demand, ascending."""
        seen = {nurse.skill_tier for nurse in self.nurses}
        seen.update(tier for (_, _, tier) in self.demand)
        return tuple(sorted(seen))

    @cached_property
    def specs_by_family(self) -> dict[str, ConstraintSpec]:
        return {spec.family: spec for spec in self.constraints}

    def demand_at(self, shift: int, day: int, tier: int) -> int:
        return self.demand.get((shift, day, tier), 0)

    def pooled_demand(self, shift: int, day: int) -> int:
        return sum(
            count for (s, d, _), count in self.demand.items() if s == shift and d == day
        )

    def spec_for(self, family: str) -> ConstraintSpec | None:
        return self.specs_by_family.get(family)

    def nurse_by_id(self, nurse_id: int) -> Nurse:
        return self.nurses[nurse_id - 1]


class Schedule:
    """Binary assignment tensor indexed by (nurse, shift, day), all 1-based.

    Mutation is confined to one solver thread at a time (single-writer);
    reads may be shared freely between mutations.
    """

    __slots__ = ("instance", "x")

    def __init__(self, instance: Instance, x: np.ndarray | None = None):
        shape = (len(instance.nurses), len(instance.shifts), instance.horizon_days)
        if x is None:
            x = np.zeros(shape, dtype=np.int8)
        else:
            x = np.asarray(x, dtype=np.int8)
            if x.shape != shape:
                raise ValueError(f"schedule tensor shape {x.shape} != instance shape {shape}")
            if not np.isin(x, (0, 1)).all():
                raise ValueError("schedule tensor entries must be 0 or 1")
        self.instance = instance
        self.x = x

    def _check_indices(self, nurse: int, shift: int, day: int) -> None:
        n_count, s_count, d_count = self.x.shape
        if not (1 <= nurse <= n_count and 1 <= shift <= s_count and 1 <= day <= d_count):
            raise IndexError(
                f"cell (nurse={nurse}, shift={shift}, day={day}) outside "
                f"{n_count}x{s_count}x{d_count} schedule"
            )

    def get(self, nurse: int, shift: int, day: int) -> int:
        self._check_indices(nurse, shift, day)
        return int(self.x[nurse - 1, shift - 1, day - 1])

    def set(self, nurse: int, shift: int, day: int, value: int) -> None:
        self._check_indices(nurse, shift, day)
        if value not in (0, 1):
            raise ValueError(f"assignment value must be 0 or 1, got {value!r}")
        self.x[nurse - 1, shift - 1, day - 1] = value

    def day_load(self, nurse: int, day: int) -> int:
        """Number of shifts the nurse works on the given day."""
        return int(self.x[nurse - 1, :, day - 1].sum())

    def shift_count(self, nurse: int, shift: int) -> int:
        """Number of days the nurse works the given shift."""
        return int(self.x[nurse - 1, shift - 1, :].sum())

    def assignments(self) -> Iterator[tuple[int, int, int]]:
        """Yield assigned (nurse, shift, day) cells in lexicographic order."""
        for n_idx, s_idx, d_idx in zip(*np.nonzero(self.x)):
            yield (int(n_idx) + 1, int(s_idx) + 1, int(d_idx) + 1)

    def total_assignments(self) -> int:
        return int(self.x.sum())

    def copy(self) -> "Schedule":
        return Schedule(self.instance, self.x.copy())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Schedule):
            return NotImplemented
        return self.x.shape == other.x.shape and bool((self.x == other.x).all())

    def __repr__(self) -> str:
        n_count, s_count, d_count = self.x.shape
        return (
            f"Schedule({self.instance.name!r}, {n_count}x{s_count}x{d_count}, "
            f"{self.total_assignments()} assigned)"
        )


def validate_instance(instance: Instance) -> list[str]:
    """Return all structural defects of the instance, empty when sound.

    Pure: repeated calls yield identical lists.  Each defect names the
    offending field and the rule it breaks.
    """
    defects: list[str] = []
    day_count = instance.horizon_days
    if day_count < 1:
        defects.append(f"horizon_days: must be positive, got {day_count}")

    shift_ids = [shift.id for shift in instance.shifts]
    if shift_ids != list(range(1, len(shift_ids) + 1)):
        defects.append(f"shifts: ids must be contiguous 1..{len(shift_ids)}, got {shift_ids}")
    night_count = sum(1 for shift in instance.shifts if shift.is_night)
    if night_count > 1:
        defects.append(f"shifts: at most one night shift allowed, found {night_count}")

    nurse_ids = [nurse.id for nurse in instance.nurses]
    if nurse_ids != list(range(1, len(nurse_ids) + 1)):
        defects.append(f"nurses: ids must be contiguous 1..{len(nurse_ids)}, got {nurse_ids}")
    valid_shift_ids = set(shift_ids)
    for nurse in instance.nurses:
        where = f"nurse {nurse.id} ({nurse.name})"
        if nurse.unit_cost < 0:
            defects.append(f"{where}: unit_cost must be >= 0, got {nurse.unit_cost}")
        for (shift, day), reduction in nurse.preferences.items():
            if reduction < 0:
                defects.append(f"{where}: preference at (shift {shift}, day {day}) must be >= 0")
            if shift not in valid_shift_ids or not (1 <= day <= day_count):
                defects.append(f"{where}: preference cell (shift {shift}, day {day}) out of range")
        bad_leave = sorted(day for day in nurse.leave_days if not (1 <= day <= day_count))
        if bad_leave:
            defects.append(f"{where}: leave_days {bad_leave} outside 1..{day_count}")
        for shift, count in nurse.required_shifts.items():
            if shift not in valid_shift_ids:
                defects.append(f"{where}: required_shifts names unknown shift {shift}")
            if count < 0:
                defects.append(f"{where}: required_shifts[{shift}] must be >= 0, got {count}")
        total_required = sum(nurse.required_shifts.values())
        if total_required > day_count:
            defects.append(
                f"{where}: required_shifts total {total_required} exceeds the "
                f"{day_count}-day horizon"
            )

    for (shift, day, tier), count in sorted(instance.demand.items()):
        where = f"demand[shift {shift}, day {day}, tier {tier}]"
        if shift not in valid_shift_ids:
            defects.append(f"{where}: unknown shift id")
        if not (1 <= day <= day_count):
            defects.append(f"{where}: day outside 1..{day_count}")
        if tier < 0:
            defects.append(f"{where}: tier must be >= 0")
        if count < 0:
            defects.append(f"{where}: count must be >= 0, got {count}")

    demanded_tiers = sorted({tier for (_, _, tier), count in instance.demand.items() if count > 0})
    for tier in demanded_tiers:
        if not any(nurse.skill_tier >= tier for nurse in instance.nurses):
            defects.append(
                f"demand: tier {tier} is demanded but no nurse is at tier {tier} "
                "or above (structurally infeasible)"
            )

    rules = instance.rules
    if rules.max_work_days < 1:
        defects.append(f"rules.max_work_days: must be positive, got {rules.max_work_days}")
    if rules.consecutive_work_limit < 1:
        defects.append(
            f"rules.consecutive_work_limit: must be positive, got {rules.consecutive_work_limit}"
        )
    if not (rules.consecutive_work_limit <= rules.max_work_days <= day_count):
        defects.append(
            "rules: need consecutive_work_limit <= max_work_days <= horizon_days, "
            f"got {rules.consecutive_work_limit} / {rules.max_work_days} / {day_count}"
        )
    if rules.max_consecutive_nights < 1:
        defects.append(
            f"rules.max_consecutive_nights: must be positive, got {rules.max_consecutive_nights}"
        )
    if rules.rest_after_nights < 0:
        defects.append(f"rules.rest_after_nights: must be >= 0, got {rules.rest_after_nights}")
    if rules.max_shift_type is not None and rules.max_shift_type < 1:
        defects.append(f"rules.max_shift_type: must be positive when set, got {rules.max_shift_type}")

    defects.extend(_validate_catalogue(instance))
    return defects


def _validate_catalogue(instance: Instance) -> list[str]:
    defects: list[str] = []
    seen: set[str] = set()
    hard_weights: set[int] = set()
    for spec in instance.constraints:
        where = f"constraints[{spec.family}]"
        if spec.family not in CONSTRAINT_FAMILIES:
            defects.append(f"{where}: unknown family")
            continue
        if spec.family in seen:
            defects.append(f"{where}: duplicate family entry")
        seen.add(spec.family)
        if spec.severity not in (HARD, SOFT):
            defects.append(f"{where}: severity must be 'hard' or 'soft', got {spec.severity!r}")
        if spec.penalty_weight < 0:
            defects.append(f"{where}: penalty_weight must be >= 0")
        if spec.severity == HARD and spec.enabled:
            hard_weights.add(spec.penalty_weight)

    if len(hard_weights) > 1:
        defects.append(
            "constraints: enabled hard families must share one penalty_weight "
            f"magnitude, got {sorted(hard_weights)}"
        )
    if len(hard_weights) == 1:
        hard_weight = next(iter(hard_weights))
        bound = soft_and_base_bound(instance)
        if hard_weight <= bound:
            defects.append(
                f"constraints: hard penalty_weight {hard_weight} does not dominate the "
                f"achievable soft-plus-base bound {bound}"
            )
    return defects


def soft_and_base_bound(instance: Instance) -> int:
    """Crude upper bound on base cost plus every achievable soft penalty.

    Any enabled hard weight must strictly exceed this so a single hard
    violation always outweighs everything soft.
    """
    n_count = len(instance.nurses)
    s_count = len(instance.shifts)
    d_count = instance.horizon_days
    bound = sum(nurse.unit_cost for nurse in instance.nurses) * s_count * d_count
    for spec in instance.constraints:
        if not spec.enabled or spec.severity != SOFT:
            continue
        if spec.family == "C1":
            magnitude = n_count * d_count * max(0, s_count - 1)
        elif spec.family == "C2":
            magnitude = n_count * max(0, s_count * d_count - instance.rules.max_work_days)
        elif spec.family == "C3":
            magnitude = n_count * max(0, d_count - instance.rules.consecutive_work_limit)
        elif spec.family == "C4":
            magnitude = n_count * d_count
        elif spec.family == "C5":
            magnitude = sum(len(nurse.leave_days) for nurse in instance.nurses) * s_count
        elif spec.family == "C6":
            magnitude = n_count * max(0, d_count - 1)
        elif spec.family == "C7":
            magnitude = n_count * s_count * d_count
        elif spec.family == "C8":
            magnitude = sum(instance.demand.values())
        elif spec.family == "C10":
            magnitude = sum(
                sum(nurse.required_shifts.values()) + s_count * d_count
                for nurse in instance.nurses
            )
        else:  # C9 carries no direct penalty
            magnitude = 0
        bound += magnitude * spec.penalty_weight
    return bound


def new_empty_schedule(instance: Instance) -> Schedule:
    """Fresh all-zero schedule for a structurally valid instance."""
    defects = validate_instance(instance)
    if defects:
        raise InstanceValidationError(defects)
    return Schedule(instance)


def coverage(schedule: Schedule, shift: int, day: int, tier: int) -> int:
    """Head count of nurses at exactly ``tier`` assigned to (shift, day)."""
    instance = schedule.instance
    if not (1 <= shift <= len(instance.shifts)) or not (1 <= day <= instance.horizon_days):
        raise IndexError(f"(shift={shift}, day={day}) outside instance dimensions")
    column = schedule.x[:, shift - 1, day - 1]
    return int(
        sum(column[nurse.id - 1] for nurse in instance.nurses if nurse.skill_tier == tier)
    )
