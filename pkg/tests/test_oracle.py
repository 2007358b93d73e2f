import itertools

import pytest

from roster_forge import (
    CostModel,
    OracleLimitError,
    OracleLimits,
    Schedule,
    gap_report,
    new_empty_schedule,
    random_instance,
    solve,
    solve_exact,
)

from conftest import catalogue, make_instance


class TestSolveExact:
    def test_zero_demand_optimum_is_empty(self):
        instance = make_instance([{"cost": 100}], {}, days=2, shifts=2)
        result = solve_exact(instance)
        assert result.optimal_cost == 0
        assert result.optimal_schedule.total_assignments() == 0
        assert result.proven_optimal

    def test_single_cell_assignment(self):
        instance = make_instance(
            [{"cost": 600, "quota": {1: 1}}], {(1, 1): 1}, days=1, shifts=1
        )
        result = solve_exact(instance)
        assert result.optimal_cost == 600
        assert result.optimal_schedule.x.tolist() == [[[1]]]

    def test_cap_refusal(self, oz):
        with pytest.raises(OracleLimitError):
            solve_exact(oz)

    def test_cap_override(self):
        instance = make_instance([{"cost": 100}], {}, days=2, shifts=2)
        solve_exact(instance, OracleLimits(max_cells=4))
        with pytest.raises(OracleLimitError):
            solve_exact(instance, OracleLimits(max_cells=3))

    def test_pruned_equals_unpruned(self):
        for seed in range(25):
            instance = random_instance(seed, 2, 2, 3)
            pruned = solve_exact(instance, OracleLimits(prune=True))
            plain = solve_exact(instance, OracleLimits(prune=False))
            assert pruned.optimal_cost == plain.optimal_cost
            assert pruned.optimal_schedule == plain.optimal_schedule
            assert pruned.nodes_explored <= plain.nodes_explored

    def test_pruned_equals_unpruned_at_eighteen_cells(self):
        # The full 2^18 sweep takes several seconds; one case at the stated
        # boundary is enough on top of the smaller batch above.
        instance = random_instance(42, 3, 2, 3)
        pruned = solve_exact(instance, OracleLimits(prune=True))
        plain = solve_exact(instance, OracleLimits(prune=False))
        assert pruned.optimal_cost == plain.optimal_cost
        assert pruned.optimal_schedule == plain.optimal_schedule

    def test_matches_itertools_enumeration(self):
        """Fully independent oracle for the oracle: score every tensor with
        the evaluator and keep the minimum."""
        for seed in (1, 2, 3):
            instance = random_instance(seed, 2, 2, 2)
            model = CostModel(instance)
            best = None
            for bits in itertools.product((0, 1), repeat=8):
                schedule = new_empty_schedule(instance)
                for flat, value in enumerate(bits):
                    nurse, rest = divmod(flat, 4)
                    shift, day = divmod(rest, 2)
                    schedule.x[nurse, shift, day] = value
                total = model.evaluate(schedule).total
                if best is None or total < best:
                    best = total
            assert solve_exact(instance).optimal_cost == best

    def test_lexicographic_tie_break(self):
        # Two identical nurses, one slot: both singleton schedules cost the
        # same, and cells enumerate day-major then shift then nurse, so the
        # winner leaves the earlier cell empty (nurse 2 assigned).
        instance = make_instance(
            [{"cost": 600}, {"cost": 600}],
            {(1, 1): 1},
            days=1,
            shifts=1,
            constraints=catalogue(C10=None),
        )
        result = solve_exact(instance)
        assert result.optimal_cost == 600
        assert result.optimal_schedule.x.tolist() == [[[0]], [[1]]]
        again = solve_exact(instance)
        assert result.optimal_schedule == again.optimal_schedule

    def test_exhaustive_on_infeasible_instance(self):
        # Demand no roster can meet: the optimum still exists, it just
        # carries hard penalties.
        instance = make_instance(
            [{"cost": 100}], {(1, 1): 3}, days=1, shifts=1, constraints=catalogue(C10=None)
        )
        result = solve_exact(instance)
        assert result.optimal_cost == 100 + 2 * 1_000_000


class TestGapReport:
    def test_zero_demand_gap_is_zero(self):
        instance = make_instance([{"cost": 100}], {}, days=2, shifts=2)
        report = gap_report(instance)
        assert report.heuristic_cost == report.optimal_cost == 0
        assert report.relative_gap == 0

    def test_heuristic_never_beats_the_oracle(self):
        for seed in range(40):
            instance = random_instance(seed, 3, 2, 3)
            report = gap_report(instance)
            assert report.heuristic_cost >= report.optimal_cost

    def test_propagates_cap_refusal(self, oz):
        with pytest.raises(OracleLimitError):
            gap_report(oz)

    def test_feasibility_agreement(self):
        """If the oracle proves an instance feasible, a heuristic miss is a
        heuristic failure, never an oracle error; re-check the oracle's
        schedule to confirm it is genuinely hard-clean."""
        for seed in range(30):
            instance = random_instance(seed, 3, 2, 3)
            exact = solve_exact(instance)
            oracle_hard = CostModel(instance).evaluate(exact.optimal_schedule).hard_penalty
            heuristic = solve(instance)
            if heuristic.feasible:
                assert oracle_hard == 0
