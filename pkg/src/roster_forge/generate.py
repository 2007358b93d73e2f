"""Seeded random instances for gap measurement, fuzzing, and property tests.

Generation is reproducible: the same (seed, dimensions) always yields the
same instance.  Instances are built around a hidden witness roster whose
row/column sums become quotas and demand, so most instances are coverable;
``jitter`` and ``wild`` deliberately break that to produce infeasible ones.
"""

from __future__ import annotations

import random

from .model import ConstraintSpec, Instance, Nurse, RuleParams, ShiftType

HARD_WEIGHT = 1_000_000

_SHIFT_LABELS = ("A", "P", "M", "Q", "R", "T")


def random_instance(
    seed: int,
    nurses: int = 3,
    shifts: int = 2,
    days: int = 3,
    *,
    wild: bool = False,
    name: str | None = None,
) -> Instance:
    """One reproducible random instance of the given dimensions.

    ``wild`` loosens the construction (leave on busy days, heavier demand
    jitter) so the output may be badly infeasible; the instance itself
    always passes structural validation.
    """
    rng = random.Random(f"{seed}:{nurses}:{shifts}:{days}:{int(wild)}")

    shift_types = tuple(
        ShiftType(id=i + 1, label=_SHIFT_LABELS[i], is_night=(shifts >= 3 and i == shifts - 1))
        for i in range(shifts)
    )

    # Hidden witness roster: one shift at most per nurse per day.
    witness = [[0] * days for _ in range(nurses)]  # 0 = off, else shift id
    for n in range(nurses):
        for day in rng.sample(range(days), rng.randint(0, days)):
            witness[n][day] = rng.randint(1, shifts)

    nurse_list = []
    for n in range(nurses):
        quotas: dict[int, int] = {}
        for day in range(days):
            shift = witness[n][day]
            if shift:
                quotas[shift] = quotas.get(shift, 0) + 1
        off_days = [d + 1 for d in range(days) if witness[n][d] == 0]
        leave = {day for day in off_days if rng.random() < 0.25}
        if wild:
            leave.update(day for day in range(1, days + 1) if rng.random() < 0.15)
        preferences = {
            (s, d): rng.randrange(1, 4) * 10
            for s in range(1, shifts + 1)
            for d in range(1, days + 1)
            if rng.random() < 0.10
        }
        nurse_list.append(
            Nurse(
                id=n + 1,
                name=f"N{n + 1}",
                unit_cost=rng.randrange(1, 20) * 100,
                skill_tier=1 if nurses > 1 and rng.random() < 0.25 else 0,
                required_shifts=quotas,
                leave_days=frozenset(leave),
                preferences=preferences,
            )
        )

    demand: dict[tuple[int, int, int], int] = {}
    for s in range(1, shifts + 1):
        for d in range(1, days + 1):
            count = sum(1 for n in range(nurses) if witness[n][d - 1] == s)
            demand[(s, d, 0)] = count
    jitter_cells = rng.sample(sorted(demand), k=min(len(demand), rng.choice((0, 0, 1, 1, 2))))
    if wild:
        jitter_cells = rng.sample(sorted(demand), k=min(len(demand), rng.randint(0, 4)))
    for cell in jitter_cells:
        demand[cell] = max(0, demand[cell] + rng.choice((-1, 1, 1)))
    demand = {cell: count for cell, count in demand.items() if count > 0}

    consecutive_limit = rng.randint(1, days)
    rules = RuleParams(
        max_work_days=rng.randint(consecutive_limit, days),
        consecutive_work_limit=consecutive_limit,
        max_consecutive_nights=rng.randint(1, 2),
        rest_after_nights=rng.randint(0, 1),
    )

    has_night = any(s.is_night for s in shift_types)
    leave_on_duty = any(
        witness[nurse.id - 1][day - 1] != 0
        for nurse in nurse_list
        for day in nurse.leave_days
    )
    leave_soft = leave_on_duty or rng.random() < 0.5
    constraints = (
        ConstraintSpec("C1", "hard", HARD_WEIGHT),
        ConstraintSpec("C2", "soft", rng.choice((50, 100, 150))),
        ConstraintSpec("C3", "soft", 50, enabled=rng.random() < 0.5),
        ConstraintSpec("C4", "soft", 50, enabled=has_night),
        ConstraintSpec("C5", "soft" if leave_soft else "hard", 100 if leave_soft else HARD_WEIGHT),
        ConstraintSpec("C6", "soft", 100, enabled=has_night),
        ConstraintSpec("C7", "hard", HARD_WEIGHT),
        ConstraintSpec("C8", "hard", HARD_WEIGHT),
        ConstraintSpec("C9", "hard", HARD_WEIGHT),
        ConstraintSpec("C10", "hard", HARD_WEIGHT),
    )

    return Instance(
        name=name or f"random-{seed}-{nurses}x{shifts}x{days}",
        horizon_days=days,
        shifts=shift_types,
        nurses=tuple(nurse_list),
        demand=demand,
        rules=rules,
        constraints=constraints,
        provenance=f"synthetic instance generated from seed {seed}",
    )
