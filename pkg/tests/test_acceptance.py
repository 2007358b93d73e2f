"""Acceptance suite: one test per criterion, each printing a PASS line with
the measured numbers (run with ``pytest -s tests/test_acceptance.py`` to see
them).  Tolerances are pinned here, not deferred."""

import json
import random
import time

from roster_forge import (
    CostModel,
    SolverConfig,
    new_empty_schedule,
    random_instance,
    render_schedule_csv,
    solve,
    solve_exact,
)
from roster_forge.cli import main
from roster_forge.io import load_published_solution, result_to_json_dict


def _report(line):
    print(f"\nACCEPTANCE {line}")


def test_criterion_1_ozkarahan_benchmark(oz, capsys):
    exit_code = main(["solve", "ozkarahan89"])
    capsys.readouterr()
    with capsys.disabled():
        assert exit_code == 0, "CLI solve must exit feasible"
        result = solve(oz)
        assert result.feasible, "ozkarahan89 must solve with zero hard violations"
        assert result.converged
        assert result.breakdown.soft_penalty <= 100, result.breakdown.soft_penalty
        assert result.wall_time < 2.0, result.wall_time
        # coverage, single-shift, and quota families all clean
        for family in ("C1", "C7", "C8", "C10"):
            assert result.breakdown.penalties[family] == 0, family
        _report(
            "1 PASS - ozkarahan89 feasible, soft penalty "
            f"{result.breakdown.soft_penalty} <= 100, {result.wall_time * 1000:.0f} ms < 2 s"
        )


def test_criterion_2_li_benchmark(li, capsys):
    exit_code = main(["solve", "li03"])
    capsys.readouterr()
    with capsys.disabled():
        assert exit_code == 0, "CLI solve must exit feasible"
        result = solve(li)
        assert result.feasible, "li03 must solve with zero hard violations"
        assert result.converged
        assert result.wall_time < 5.0, result.wall_time
        _report(f"2 PASS - li03 feasible in {result.wall_time * 1000:.0f} ms < 5 s")


def test_criterion_3_published_solutions_validate(tmp_path, capsys):
    exit_codes = {}
    soft = {}
    for name in ("ozkarahan89", "li03"):
        published = load_published_solution(name)
        path = tmp_path / f"{name}.csv"
        path.write_text(render_schedule_csv(published))
        exit_codes[name] = main(["check", name, str(path)])
        soft[name] = CostModel(published.instance).evaluate(published).soft_penalty
    capsys.readouterr()
    with capsys.disabled():
        assert exit_codes == {"ozkarahan89": 0, "li03": 0}
        assert soft["ozkarahan89"] == 100
        _report(
            "3 PASS - published rosters check hard-clean "
            f"(soft penalties: ozkarahan89={soft['ozkarahan89']}, li03={soft['li03']})"
        )


def test_criterion_4_incremental_cost_exactness(capsys):
    with capsys.disabled():
        rng = random.Random(20250810)
        flips = 0
        for seed in range(50):
            instance = random_instance(
                seed, 1 + seed % 4, 1 + seed % 3, 1 + seed % 5, wild=(seed % 2 == 0)
            )
            model = CostModel(instance)
            schedule = new_empty_schedule(instance)
            for _ in range(20):
                nurse = rng.randint(1, len(instance.nurses))
                shift = rng.randint(1, len(instance.shifts))
                day = rng.randint(1, instance.horizon_days)
                new_value = 1 - schedule.get(nurse, shift, day)
                before = model.evaluate(schedule).total
                delta = model.delta(schedule, nurse, shift, day, new_value)
                schedule.set(nurse, shift, day, new_value)
                after = model.evaluate(schedule).total
                assert delta == after - before, (seed, nurse, shift, day)
                flips += 1
        assert flips == 1000
        _report("4 PASS - 1000 random flips over 50 instances match full recompute exactly")


def test_criterion_5_oracle_dominance_and_gap(capsys):
    with capsys.disabled():
        started = time.perf_counter()
        gaps = []
        for seed in range(100):
            instance = random_instance(seed, 3, 2, 3)
            heuristic = solve(instance, SolverConfig())
            exact = solve_exact(instance)
            assert heuristic.breakdown.total >= exact.optimal_cost, seed
            gaps.append(
                (heuristic.breakdown.total - exact.optimal_cost) / max(1, exact.optimal_cost)
            )
        elapsed = time.perf_counter() - started
        assert elapsed < 60.0, elapsed
        mean_gap = sum(gaps) / len(gaps)
        matched = sum(1 for gap in gaps if gap == 0)
        _report(
            "5 PASS - oracle never undercut on 100 seeded 3x2x3 instances; "
            f"mean relative gap {mean_gap:.4f} (optimum matched {matched}/100), "
            f"suite {elapsed:.1f} s < 60 s"
        )


def test_criterion_6_determinism(oz, li, capsys):
    with capsys.disabled():
        for instance in (oz, li):
            first = solve(instance)
            second = solve(instance)
            first_doc = result_to_json_dict(first)
            second_doc = result_to_json_dict(second)
            trace_bytes = json.dumps(first_doc["trace"]).encode()
            assert trace_bytes == json.dumps(second_doc["trace"]).encode()
            schedule_bytes = render_schedule_csv(first.schedule).encode()
            assert schedule_bytes == render_schedule_csv(second.schedule).encode()
        _report("6 PASS - repeated benchmark solves are byte-identical (traces and schedules)")


def test_criterion_7_termination_fuzz(capsys):
    with capsys.disabled():
        infeasible = 0
        for seed in range(1000):
            instance = random_instance(
                seed, 1 + seed % 4, 1 + seed % 3, 1 + seed % 5, wild=True
            )
            result = solve(instance)  # must neither raise nor hang
            assert result.iterations <= SolverConfig().iteration_cap(instance)
            assert result.converged in (True, False)
            if not result.feasible:
                infeasible += 1
        _report(
            "7 PASS - 1000-instance fuzz halted within the iteration cap every time "
            f"({infeasible} flagged infeasible, none crashed)"
        )
