"""Report rendering: figures written to files next to the delimited output.

matplotlib is imported lazily with the Agg backend so plain library use and
non-report CLI runs never touch a display backend.
"""

from __future__ import annotations

import json
import os

from .io import render_schedule_csv, result_to_json_dict
from .solver import SolveResult


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def save_roster_figure(result: SolveResult, path: str) -> None:
    """Assignment grid as an image: nurses down, day x shift across."""
    plt = _pyplot()
    schedule = result.schedule
    instance = schedule.instance
    n_count, s_count, d_count = schedule.x.shape
    grid = schedule.x.transpose(0, 2, 1).reshape(n_count, d_count * s_count)
    labels = [
        f"d{day}.{shift.label}"
        for day in range(1, d_count + 1)
        for shift in instance.shifts
    ]

    fig, ax = plt.subplots(
        figsize=(max(6.0, 0.42 * len(labels) + 2.0), max(3.0, 0.32 * n_count + 1.5))
    )
    ax.imshow(grid, cmap="Greys", vmin=0, vmax=1, aspect="auto")
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, rotation=90, fontsize=7)
    ax.set_yticks(range(n_count))
    ax.set_yticklabels([f"{n.name} ({n.unit_cost})" for n in instance.nurses], fontsize=7)
    for day in range(1, d_count):
        ax.axvline(day * s_count - 0.5, color="tab:blue", linewidth=0.6)
    status = "feasible" if result.feasible else "infeasible"
    ax.set_title(
        f"{instance.name}: total {result.breakdown.total}, "
        f"soft {result.breakdown.soft_penalty}, {status}",
        fontsize=9,
    )
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_gap_figure(rows: list[dict], path: str) -> None:
    """Per-instance relative gaps as bars with the mean marked."""
    plt = _pyplot()
    gaps = [row["relative_gap"] for row in rows]
    fig, ax = plt.subplots(figsize=(max(6.0, 0.08 * len(gaps) + 2.0), 3.5))
    if gaps:
        ax.bar(range(len(gaps)), gaps, color="tab:blue")
        mean_gap = sum(gaps) / len(gaps)
        ax.axhline(mean_gap, color="tab:red", linewidth=1.0, label=f"mean {mean_gap:.4f}")
        ax.legend(fontsize=8)
    ax.set_xlabel("instance index")
    ax.set_ylabel("relative gap")
    ax.set_title("heuristic vs exact optimum", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def write_solve_report(result: SolveResult, directory: str) -> list[str]:
    """Write roster.csv, result.json, and roster.png into ``directory``."""
    os.makedirs(directory, exist_ok=True)
    written = []
    csv_path = os.path.join(directory, "roster.csv")
    with open(csv_path, "w", encoding="utf-8") as handle:
        handle.write(render_schedule_csv(result.schedule))
    written.append(csv_path)
    json_path = os.path.join(directory, "result.json")
    with open(json_path, "w", encoding="utf-8") as handle:
        json.dump(result_to_json_dict(result), handle, indent=2)
        handle.write("\n")
    written.append(json_path)
    png_path = os.path.join(directory, "roster.png")
    save_roster_figure(result, png_path)
    written.append(png_path)
    return written


def write_gap_report(rows: list[dict], summary: dict, directory: str) -> list[str]:
    """Write gaps.csv, gaps.json, and gaps.png into ``directory``."""
    os.makedirs(directory, exist_ok=True)
    written = []
    csv_path = os.path.join(directory, "gaps.csv")
    columns = ["index", "seed", "nurses", "shifts", "days",
               "heuristic_cost", "optimal_cost", "relative_gap", "nodes_explored"]
    with open(csv_path, "w", encoding="utf-8") as handle:
        handle.write(",".join(columns) + "\n")
        for row in rows:
            handle.write(",".join(str(row[column]) for column in columns) + "\n")
    written.append(csv_path)
    json_path = os.path.join(directory, "gaps.json")
    with open(json_path, "w", encoding="utf-8") as handle:
        json.dump({"instances": rows, "summary": summary}, handle, indent=2)
        handle.write("\n")
    written.append(json_path)
    png_path = os.path.join(directory, "gaps.png")
    save_gap_figure(rows, png_path)
    written.append(png_path)
    return written
