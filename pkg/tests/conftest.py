import pytest

from roster_forge import (
    ConstraintSpec,
    Instance,
    Nurse,
    RuleParams,
    ShiftType,
    load_benchmark,
    load_published_solution,
)

HARD = 1_000_000

_DEFAULT_CATALOGUE = {
    "C1": ("hard", HARD, True),
    "C2": ("soft", 100, True),
    "C3": ("soft", 100, False),
    "C4": ("hard", HARD, False),
    "C5": ("hard", HARD, True),
    "C6": ("hard", HARD, False),
    "C7": ("hard", HARD, True),
    "C8": ("hard", HARD, True),
    "C9": ("hard", HARD, True),
    "C10": ("hard", HARD, True),
}


def catalogue(**overrides):
    """Full ten-family catalogue; override entries with
    ``family=(severity, weight, enabled)`` or disable with ``family=None``."""
    entries = dict(_DEFAULT_CATALOGUE)
    for family, value in overrides.items():
        if value is None:
            severity, weight, _ = entries[family]
            entries[family] = (severity, weight, False)
        else:
            entries[family] = value
    return tuple(
        ConstraintSpec(family, severity, weight, enabled)
        for family, (severity, weight, enabled) in entries.items()
    )


def make_instance(
    nurses,
    demand,
    days=3,
    shifts=2,
    night_shift=None,
    rules=None,
    constraints=None,
    name="synthetic",
):
    """Small instance builder for tests.

    ``nurses`` is a list of dicts with at least ``cost``; ``demand`` maps
    (shift, day) or (shift, day, tier) to counts.
    """
    labels = ("A", "P", "M", "Q", "R", "T")
    shift_types = tuple(
        ShiftType(id=i + 1, label=labels[i], is_night=(night_shift == i + 1))
        for i in range(shifts)
    )
    nurse_objs = tuple(
        Nurse(
            id=i + 1,
            name=spec.get("name", f"N{i + 1}"),
            unit_cost=spec["cost"],
            skill_tier=spec.get("tier", 0),
            required_shifts=spec.get("quota", {}),
            leave_days=frozenset(spec.get("leave", ())),
            preferences=spec.get("preferences", {}),
        )
        for i, spec in enumerate(nurses)
    )
    demand_map = {}
    for key, count in demand.items():
        if len(key) == 2:
            key = (key[0], key[1], 0)
        if count:
            demand_map[key] = count
    return Instance(
        name=name,
        horizon_days=days,
        shifts=shift_types,
        nurses=nurse_objs,
        demand=demand_map,
        rules=rules or RuleParams(max_work_days=days, consecutive_work_limit=days),
        constraints=constraints if constraints is not None else catalogue(),
    )


@pytest.fixture(scope="session")
def oz():
    return load_benchmark("ozkarahan89")


@pytest.fixture(scope="session")
def li():
    return load_benchmark("li03")


@pytest.fixture(scope="session")
def oz_published():
    return load_published_solution("ozkarahan89")


@pytest.fixture(scope="session")
def li_published():
    return load_published_solution("li03")
