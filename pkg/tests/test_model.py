import numpy as np
import pytest

from roster_forge import (
    InstanceValidationError,
    Schedule,
    coverage,
    new_empty_schedule,
    validate_instance,
)

from conftest import catalogue, make_instance


class TestNewEmptySchedule:
    def test_ozkarahan_dimensions(self, oz):
        schedule = new_empty_schedule(oz)
        assert schedule.x.shape == (14, 2, 7)
        assert not schedule.x.any()

    def test_li_dimensions(self, li):
        schedule = new_empty_schedule(li)
        assert schedule.x.shape == (16, 3, 7)
        assert not schedule.x.any()

    def test_minimal_instance(self):
        instance = make_instance(
            [{"cost": 100, "quota": {1: 1}}], {(1, 1): 1}, days=1, shifts=1
        )
        schedule = new_empty_schedule(instance)
        assert schedule.x.shape == (1, 1, 1)

    def test_invalid_instance_raises_with_defects(self):
        instance = make_instance(
            [{"cost": -5, "quota": {1: 1}}], {(1, 1): 1}, days=1, shifts=1
        )
        with pytest.raises(InstanceValidationError) as excinfo:
            new_empty_schedule(instance)
        assert any("unit_cost" in defect for defect in excinfo.value.defects)


class TestValidateInstance:
    def test_benchmarks_are_clean(self, oz, li):
        assert validate_instance(oz) == []
        assert validate_instance(li) == []

    def test_overfull_quota_names_the_nurse(self):
        instance = make_instance(
            [{"cost": 100, "quota": {1: 3, 2: 1}}], {(1, 1): 1}, days=3
        )
        defects = validate_instance(instance)
        assert len(defects) == 1
        assert "nurse 1" in defects[0] and "required_shifts total 4" in defects[0]

    def test_unstaffable_tier_is_flagged(self):
        instance = make_instance(
            [{"cost": 100, "tier": 0}], {(1, 1, 5): 1}, days=1, shifts=1
        )
        defects = validate_instance(instance)
        assert any("tier 5" in defect and "infeasible" in defect for defect in defects)

    def test_gapped_shift_ids(self):
        from roster_forge import ShiftType

        instance = make_instance([{"cost": 100}], {(1, 1): 1})
        instance.shifts = (instance.shifts[0], ShiftType(id=3, label="X"))
        assert any("contiguous" in defect for defect in validate_instance(instance))

    def test_mixed_hard_weights_rejected(self):
        specs = catalogue(C1=("hard", 999, True))
        instance = make_instance([{"cost": 100}], {(1, 1): 1}, constraints=specs)
        defects = validate_instance(instance)
        assert any("share one penalty_weight" in defect for defect in defects)

    def test_hard_weight_must_dominate(self):
        specs = catalogue(
            C1=("hard", 500, True),
            C5=("hard", 500, True),
            C7=("hard", 500, True),
            C8=("hard", 500, True),
            C9=("hard", 500, True),
            C10=("hard", 500, True),
        )
        instance = make_instance([{"cost": 400}], {(1, 1): 1}, constraints=specs)
        defects = validate_instance(instance)
        assert any("dominate" in defect for defect in defects)

    def test_pure(self, oz):
        assert validate_instance(oz) == validate_instance(oz)
        instance = make_instance([{"cost": 100, "quota": {1: 9}}], {(1, 1): 1})
        assert validate_instance(instance) == validate_instance(instance)


class TestCoverage:
    def test_published_day1_first_shift_pooled(self, oz, oz_published):
        pooled = sum(coverage(oz_published, 1, 1, tier) for tier in oz.tiers)
        assert pooled == 5

    def test_empty_schedule(self, oz):
        schedule = new_empty_schedule(oz)
        assert coverage(schedule, 1, 1, 0) == 0
        assert coverage(schedule, 2, 7, 1) == 0

    def test_single_assignment(self, oz):
        schedule = new_empty_schedule(oz)
        schedule.set(3, 1, 2, 1)  # AID14, tier 0
        assert coverage(schedule, 1, 2, 0) == 1
        assert coverage(schedule, 1, 2, 1) == 0

    def test_out_of_range(self, oz, oz_published):
        with pytest.raises(IndexError):
            coverage(oz_published, 3, 1, 0)
        with pytest.raises(IndexError):
            coverage(oz_published, 1, 8, 0)

    def test_tier_sum_matches_column_sum(self, oz, oz_published):
        for day in range(1, 8):
            for shift in (1, 2):
                pooled = sum(coverage(oz_published, shift, day, tier) for tier in oz.tiers)
                assert pooled == int(oz_published.x[:, shift - 1, day - 1].sum())


class TestSchedule:
    def test_set_get_and_bounds(self, oz):
        schedule = new_empty_schedule(oz)
        schedule.set(1, 1, 1, 1)
        assert schedule.get(1, 1, 1) == 1
        with pytest.raises(IndexError):
            schedule.get(15, 1, 1)
        with pytest.raises(IndexError):
            schedule.set(1, 3, 1, 1)
        with pytest.raises(ValueError):
            schedule.set(1, 1, 1, 2)

    def test_copy_is_independent(self, oz):
        schedule = new_empty_schedule(oz)
        clone = schedule.copy()
        clone.set(1, 1, 1, 1)
        assert schedule.get(1, 1, 1) == 0
        assert schedule != clone

    def test_rejects_non_binary_tensor(self, oz):
        tensor = np.zeros((14, 2, 7), dtype=np.int8)
        tensor[0, 0, 0] = 2
        with pytest.raises(ValueError):
            Schedule(oz, tensor)

    def test_rejects_wrong_shape(self, oz):
        with pytest.raises(ValueError):
            Schedule(oz, np.zeros((14, 2, 6), dtype=np.int8))
