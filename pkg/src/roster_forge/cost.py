"""Penalized objective evaluation: full recompute and exact single-flip deltas.

The evaluators are stateless over read-only schedule views, so distinct
schedules can be scored in parallel.  ``delta_evaluate`` assumes it has the
schedule to itself while it runs (single-writer discipline).

Money is integer minor units end to end; delta and full recompute must agree
bit for bit, so no floats enter the accounting.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import (
    HARD,
    SOFT,
    CONSTRAINT_FAMILIES,
    Instance,
    Nurse,
    Schedule,
)


@dataclass(frozen=True)
class Violation:
    """One constraint breach. The locus fields that identify it are set,
    the rest stay None; ``penalty`` is magnitude times the family weight."""

    family: str
    magnitude: int
    penalty: int
    nurse: int | None = None
    shift: int | None = None
    day: int | None = None
    tier: int | None = None

    def locus(self) -> str:
        parts = []
        if self.nurse is not None:
            parts.append(f"nurse={self.nurse}")
        if self.shift is not None:
            parts.append(f"shift={self.shift}")
        if self.day is not None:
            parts.append(f"day={self.day}")
        if self.tier is not None:
            parts.append(f"tier={self.tier}")
        return " ".join(parts)


@dataclass(frozen=True)
class CostBreakdown:
    """Objective value split into base cost, preference reductions, and
    per-family penalties. ``total = base_cost - preference_reduction +
    sum(penalties)``; hard and soft subtotals partition the penalties."""

    base_cost: int
    preference_reduction: int
    penalties: dict[str, int]
    hard_penalty: int
    soft_penalty: int
    total: int


class CostModel:
    """Prices schedules for one instance, with optional weight overrides.

    ``hard_weight`` replaces the weight of every enabled hard family;
    ``shortfall_weight`` and ``excess_weight`` re-price under- and
    over-coverage regardless of class.  Families C4 and C6 are inert when
    the instance has no night shift.
    """

    def __init__(
        self,
        instance: Instance,
        *,
        hard_weight: int | None = None,
        shortfall_weight: int | None = None,
        excess_weight: int | None = None,
    ):
        self.instance = instance
        self.night_id = instance.night_shift_id
        # Morning is shift id 1 by convention; C6 needs a distinct night shift.
        self.morning_id = 1 if len(instance.shifts) >= 1 else None
        self.weights: dict[str, int] = {}
        self.severity: dict[str, str] = {}
        for spec in instance.constraints:
            if not spec.enabled:
                continue
            if spec.family in ("C4", "C6") and (self.night_id is None or self.night_id == 1):
                continue
            weight = spec.penalty_weight
            if hard_weight is not None and spec.severity == HARD:
                weight = hard_weight
            self.weights[spec.family] = weight
            self.severity[spec.family] = spec.severity
        if shortfall_weight is not None and "C8" in self.weights:
            self.weights["C8"] = shortfall_weight
        if excess_weight is not None and "C7" in self.weights:
            self.weights["C7"] = excess_weight

        self.tiers = instance.tiers
        self._tier_nurse_index = {
            tier: np.array(
                [nurse.id - 1 for nurse in instance.nurses if nurse.skill_tier == tier],
                dtype=np.intp,
            )
            for tier in self.tiers
        }
        self._pooled_demand = {
            (shift.id, day): instance.pooled_demand(shift.id, day)
            for shift in instance.shifts
            for day in range(1, instance.horizon_days + 1)
        }

    def enabled(self, family: str) -> bool:
        return family in self.weights

    def is_hard(self, family: str) -> bool:
        return self.severity.get(family) == HARD

    def hard_families(self) -> frozenset[str]:
        return frozenset(f for f, sev in self.severity.items() if sev == HARD)

    # -- per-nurse families ------------------------------------------------

    def nurse_violations(self, row: np.ndarray, nurse: Nurse) -> list[Violation]:
        """All C1-C6 and C10 violations of one nurse, from her (S, D) row."""
        out: list[Violation] = []
        instance = self.instance
        day_count = instance.horizon_days
        day_loads = row.sum(axis=0)

        weight = self.weights.get("C1")
        if weight is not None:
            for d_idx in np.nonzero(day_loads > 1)[0]:
                magnitude = int(day_loads[d_idx]) - 1
                out.append(
                    Violation("C1", magnitude, magnitude * weight, nurse=nurse.id, day=int(d_idx) + 1)
                )

        weight = self.weights.get("C2")
        if weight is not None:
            total = int(row.sum())
            cap = instance.rules.max_work_days
            if total > cap:
                magnitude = total - cap
                out.append(Violation("C2", magnitude, magnitude * weight, nurse=nurse.id))

        weight = self.weights.get("C3")
        if weight is not None:
            window = instance.rules.consecutive_work_limit + 1
            worked = day_loads > 0
            for start in range(day_count - window + 1):
                if worked[start : start + window].all():
                    out.append(Violation("C3", 1, weight, nurse=nurse.id, day=start + 1))

        weight = self.weights.get("C4")
        if weight is not None:
            out.extend(self._night_rest_violations(row, nurse, weight))

        weight = self.weights.get("C5")
        if weight is not None:
            for day in sorted(nurse.leave_days):
                load = int(day_loads[day - 1])
                if load > 0:
                    out.append(Violation("C5", load, load * weight, nurse=nurse.id, day=day))

        weight = self.weights.get("C6")
        if weight is not None:
            nights = row[self.night_id - 1]
            mornings = row[self.morning_id - 1]
            for day in range(1, day_count):
                if nights[day - 1] and mornings[day]:
                    out.append(Violation("C6", 1, weight, nurse=nurse.id, day=day))

        weight = self.weights.get("C10")
        if weight is not None:
            for shift in instance.shifts:
                count = int(row[shift.id - 1].sum())
                magnitude = abs(count - nurse.quota(shift.id))
                if magnitude:
                    out.append(
                        Violation("C10", magnitude, magnitude * weight, nurse=nurse.id, shift=shift.id)
                    )
        return out

    def _night_rest_violations(self, row: np.ndarray, nurse: Nurse, weight: int) -> list[Violation]:
        out: list[Violation] = []
        rules = self.instance.rules
        day_count = self.instance.horizon_days
        nights = row[self.night_id - 1]
        day_loads = row.sum(axis=0)
        run_length = 0
        for d_idx in range(day_count + 1):
            if d_idx < day_count and nights[d_idx]:
                run_length += 1
                continue
            # a maximal night run just ended at d_idx - 1
            if run_length >= rules.max_consecutive_nights:
                block_start = d_idx  # first day after the run (0-based)
                block_end = min(day_count, block_start + rules.rest_after_nights + 1)
                worked_in_block = int((day_loads[block_start:block_end] > 0).sum())
                if worked_in_block:
                    out.append(
                        Violation(
                            "C4",
                            worked_in_block,
                            worked_in_block * weight,
                            nurse=nurse.id,
                            day=block_start + 1,
                        )
                    )
            run_length = 0
        return out

    # -- coverage (C7/C8 with the C9 cascade) ------------------------------

    def cell_supply(self, schedule: Schedule, shift: int, day: int) -> dict[int, int]:
        """Assigned head count per skill tier at one (shift, day) cell."""
        column = schedule.x[:, shift - 1, day - 1]
        return {
            tier: int(column[idx].sum()) for tier, idx in self._tier_nurse_index.items()
        }

    def cell_shortfalls(self, supply: dict[int, int], shift: int, day: int) -> dict[int, int]:
        """Effective shortfall per tier, after cascading senior surplus down
        one tier at a time when C9 is enabled."""
        instance = self.instance
        cascade = self.enabled("C9")
        shortfalls: dict[int, int] = {}
        carry = 0
        for tier in reversed(self.tiers):
            available = supply.get(tier, 0) + (carry if cascade else 0)
            needed = instance.demand_at(shift, day, tier)
            if needed > available:
                shortfalls[tier] = needed - available
                carry = 0
            else:
                carry = available - needed
        return shortfalls

    def cell_violations(self, supply: dict[int, int], shift: int, day: int) -> list[Violation]:
        out: list[Violation] = []
        weight = self.weights.get("C8")
        if weight is not None:
            for tier, shortfall in sorted(self.cell_shortfalls(supply, shift, day).items()):
                out.append(
                    Violation("C8", shortfall, shortfall * weight, shift=shift, day=day, tier=tier)
                )
        weight = self.weights.get("C7")
        if weight is not None:
            excess = sum(supply.values()) - self._pooled_demand[(shift, day)]
            if excess > 0:
                out.append(Violation("C7", excess, excess * weight, shift=shift, day=day))
        return out

    # -- allocation-free twins for the delta hot path ------------------------

    def _nurse_penalty(self, row: np.ndarray, nurse: Nurse) -> int:
        """Penalty total of one nurse's row; must stay in lockstep with
        :meth:`nurse_violations` (the exactness property tests enforce it)."""
        instance = self.instance
        day_count = instance.horizon_days
        loads = row.sum(axis=0).tolist()
        total = 0

        weight = self.weights.get("C1")
        if weight is not None:
            for load in loads:
                if load > 1:
                    total += (load - 1) * weight

        weight = self.weights.get("C2")
        if weight is not None:
            excess = sum(loads) - instance.rules.max_work_days
            if excess > 0:
                total += excess * weight

        weight = self.weights.get("C3")
        if weight is not None:
            window = instance.rules.consecutive_work_limit + 1
            run = 0
            for day_index in range(day_count + 1):
                if day_index < day_count and loads[day_index]:
                    run += 1
                    continue
                if run >= window:
                    total += (run - window + 1) * weight
                run = 0

        weight = self.weights.get("C4")
        if weight is not None:
            nights = row[self.night_id - 1].tolist()
            rules = instance.rules
            run = 0
            for day_index in range(day_count + 1):
                if day_index < day_count and nights[day_index]:
                    run += 1
                    continue
                if run >= rules.max_consecutive_nights:
                    block_end = min(day_count, day_index + rules.rest_after_nights + 1)
                    worked = sum(1 for d in range(day_index, block_end) if loads[d])
                    total += worked * weight
                run = 0

        weight = self.weights.get("C5")
        if weight is not None:
            for day in nurse.leave_days:
                total += loads[day - 1] * weight

        weight = self.weights.get("C6")
        if weight is not None:
            nights = row[self.night_id - 1]
            mornings = row[self.morning_id - 1]
            for day_index in range(day_count - 1):
                if nights[day_index] and mornings[day_index + 1]:
                    total += weight

        weight = self.weights.get("C10")
        if weight is not None:
            counts = row.sum(axis=1).tolist()
            for shift in instance.shifts:
                deviation = abs(counts[shift.id - 1] - nurse.quota(shift.id))
                total += deviation * weight
        return total

    def _cell_penalty(self, supply: dict[int, int], shift: int, day: int) -> int:
        """Penalty total of one coverage cell; lockstep twin of
        :meth:`cell_violations`."""
        total = 0
        weight = self.weights.get("C8")
        if weight is not None:
            for shortfall in self.cell_shortfalls(supply, shift, day).values():
                total += shortfall * weight
        weight = self.weights.get("C7")
        if weight is not None:
            excess = sum(supply.values()) - self._pooled_demand[(shift, day)]
            if excess > 0:
                total += excess * weight
        return total

    # -- whole-schedule scoring --------------------------------------------

    def violations(self, schedule: Schedule) -> list[Violation]:
        """Every violation of the schedule, in deterministic order."""
        out: list[Violation] = []
        for nurse in self.instance.nurses:
            out.extend(self.nurse_violations(schedule.x[nurse.id - 1], nurse))
        for day in range(1, self.instance.horizon_days + 1):
            for shift in self.instance.shifts:
                supply = self.cell_supply(schedule, shift.id, day)
                out.extend(self.cell_violations(supply, shift.id, day))
        return out

    def evaluate(self, schedule: Schedule) -> CostBreakdown:
        instance = self.instance
        counts = schedule.x.sum(axis=(1, 2))
        base = int(sum(nurse.unit_cost * int(counts[nurse.id - 1]) for nurse in instance.nurses))
        reduction = 0
        for nurse in instance.nurses:
            row = schedule.x[nurse.id - 1]
            for (shift, day), gain in nurse.preferences.items():
                if row[shift - 1, day - 1]:
                    reduction += gain
        penalties = {family: 0 for family in CONSTRAINT_FAMILIES}
        hard_total = 0
        soft_total = 0
        for violation in self.violations(schedule):
            penalties[violation.family] += violation.penalty
            if self.is_hard(violation.family):
                hard_total += violation.penalty
            else:
                soft_total += violation.penalty
        total = base - reduction + hard_total + soft_total
        return CostBreakdown(
            base_cost=base,
            preference_reduction=reduction,
            penalties=penalties,
            hard_penalty=hard_total,
            soft_penalty=soft_total,
            total=total,
        )

    def delta(self, schedule: Schedule, nurse_id: int, shift: int, day: int, new_value: int) -> int:
        """Exact change of ``evaluate(...).total`` if the cell were flipped.

        Only the flipped nurse's row and the flipped (shift, day) coverage
        cell can change, so those are re-priced and everything else is left
        alone.  Raises on a no-op flip.
        """
        if new_value not in (0, 1):
            raise ValueError(f"new_value must be 0 or 1, got {new_value!r}")
        current = schedule.get(nurse_id, shift, day)
        if new_value == current:
            raise ValueError(
                f"no-op flip: cell (nurse={nurse_id}, shift={shift}, day={day}) "
                f"already holds {current}"
            )
        nurse = self.instance.nurse_by_id(nurse_id)
        sign = 1 if new_value else -1
        delta = sign * (nurse.unit_cost - nurse.preferences.get((shift, day), 0))

        row = schedule.x[nurse_id - 1]
        before = self._nurse_penalty(row, nurse)
        flipped = row.copy()
        flipped[shift - 1, day - 1] = new_value
        after = self._nurse_penalty(flipped, nurse)
        delta += after - before

        supply = self.cell_supply(schedule, shift, day)
        before = self._cell_penalty(supply, shift, day)
        shifted = dict(supply)
        shifted[nurse.skill_tier] = shifted.get(nurse.skill_tier, 0) + sign
        after = self._cell_penalty(shifted, shift, day)
        delta += after - before
        return delta


# -- module-level operations over the instance's own weights ----------------


def evaluate(schedule: Schedule) -> CostBreakdown:
    """Score a schedule with the weights from its instance catalogue."""
    return CostModel(schedule.instance).evaluate(schedule)


def delta_evaluate(schedule: Schedule, nurse: int, shift: int, day: int, new_value: int) -> int:
    """Signed total-cost change of flipping one cell, without a full recompute."""
    return CostModel(schedule.instance).delta(schedule, nurse, shift, day, new_value)


def _family_violations(schedule: Schedule, family: str) -> list[Violation]:
    model = CostModel(schedule.instance)
    return [v for v in model.violations(schedule) if v.family == family]


def check_one_shift_per_day(schedule: Schedule) -> list[Violation]:
    """C1: one violation per (nurse, day) working more than one shift."""
    return _family_violations(schedule, "C1")


def check_max_work_days(schedule: Schedule) -> list[Violation]:
    """C2: one violation per nurse assigned more than the work-day cap."""
    return _family_violations(schedule, "C2")


def check_consecutive_work(schedule: Schedule) -> list[Violation]:
    """C3: one violation per fully-worked window one day longer than the limit."""
    return _family_violations(schedule, "C3")


def check_night_rest(schedule: Schedule) -> list[Violation]:
    """C4: one violation per night run whose rest block contains assignments."""
    return _family_violations(schedule, "C4")


def check_leave(schedule: Schedule) -> list[Violation]:
    """C5: one violation per (nurse, day) assigned on a requested leave day."""
    return _family_violations(schedule, "C5")


def check_night_morning(schedule: Schedule) -> list[Violation]:
    """C6: one violation per night shift followed by a morning shift."""
    return _family_violations(schedule, "C6")


def check_coverage(schedule: Schedule) -> list[Violation]:
    """C7/C8 with the C9 cascade: shortfall per (shift, day, tier) after
    senior surplus stands in, plus pooled over-coverage per (shift, day)."""
    model = CostModel(schedule.instance)
    return [v for v in model.violations(schedule) if v.family in ("C7", "C8")]


def check_required_shifts(schedule: Schedule) -> list[Violation]:
    """C10: one violation per (nurse, shift) off its exact duty quota."""
    return _family_violations(schedule, "C10")
