"""Report rendering: delimited per-level profiles and matplotlib figures.

matplotlib is imported lazily with the Agg backend so the CLI stays headless
and figure-free runs never touch it.
"""

from __future__ import annotations

import csv

from .construction import SizeReport


def write_level_csv(report: SizeReport, path) -> None:
    """Per-level node counts as `level,nodes` rows."""
    with open(path, "w", newline="", encoding="ascii") as handle:
        writer = csv.writer(handle)
        writer.writerow(["level", "nodes"])
        for level in sorted(report.per_level_histogram):
            writer.writerow([level, report.per_level_histogram[level]])


def render_level_profile(report: SizeReport, path) -> None:
    """Bar chart of nodes per level with the per-copy cost in the title."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    levels = sorted(report.per_level_histogram)
    counts = [report.per_level_histogram[level] for level in levels]
    fig, ax = plt.subplots(figsize=(8, 4))
    ax.bar(levels, counts, color="#4878cf", width=0.8)
    ax.set_xlabel("level")
    ax.set_ylabel("nodes")
    state = "pruned" if report.pruned else "unpruned"
    ax.set_title(
        f"n={report.n}, m={report.m} ({state}): {report.total_nodes} nodes, "
        f"{float(report.per_copy):g} per copy (bound {report.per_copy_bound})"
    )
    ax.axhline(1 << (1 << report.n), color="#d65f5f", linestyle="--", linewidth=1)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
