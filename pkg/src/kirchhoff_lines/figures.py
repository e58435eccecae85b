"""Report figures rendered next to the delimited verification output."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .drawing import NODE_KINDS
from .measures import IntensityMeasure, SystemParams
from .stats import ReplicaSummary, expected_node_counts


def _law_panel(ax, marks: list[float], nu: IntensityMeasure, title: str) -> None:
    ax.set_title(title, fontsize=9)
    if not marks:
        ax.text(0.5, 0.5, "no samples", ha="center", va="center")
        return
    if nu.kind == "atomic":
        values = [float(v) for v in nu.support_values()]
        probs = np.array([nu.weight(v) for v in values]) / nu.total_mass
        counts = {v: 0 for v in values}
        for m in marks:
            k = nu.index_of(m)
            if k is not None:
                counts[nu.value_of(k)] = counts.get(nu.value_of(k), 0) + 1
        freq = np.array([counts[v] for v in values], dtype=float) / len(marks)
        width = min(0.8, 0.35 * min(
            (b - a for a, b in zip(values, values[1:])), default=1.0))
        ax.bar([v - width / 2 for v in values], freq, width=width,
               color="#4878cf", label="observed")
        ax.bar([v + width / 2 for v in values], probs, width=width,
               color="#d65f5f", label="law")
        ax.legend(fontsize=7)
    else:
        ax.hist(marks, bins=40, density=True, color="#4878cf", alpha=0.7,
                label="observed")
        grid = np.linspace(min(marks), max(marks), 300)
        dens = np.array([nu.weight(float(x)) for x in grid]) / nu.total_mass
        ax.plot(grid, dens, color="#d65f5f", lw=1.5, label="law")
        ax.legend(fontsize=7)


def _position_panel(ax, positions: list[float], title: str) -> None:
    ax.set_title(title, fontsize=9)
    if not positions:
        ax.text(0.5, 0.5, "no samples", ha="center", va="center")
        return
    ax.hist(positions, bins=25, range=(0.0, 1.0), density=True,
            color="#4878cf", alpha=0.7)
    ax.axhline(1.0, color="#d65f5f", lw=1.5)
    ax.set_xlim(0.0, 1.0)


def exit_figure(summaries: list[ReplicaSummary], params: SystemParams,
                path: str) -> str:
    """Exit positions and intensities on the top and right sides."""
    fig, axes = plt.subplots(2, 2, figsize=(8, 6))
    top_pos = [x for s in summaries for x, _ in s.top]
    top_marks = [m for s in summaries for _, m in s.top]
    right_pos = [y for s in summaries for y, _ in s.right]
    right_marks = [m for s in summaries for _, m in s.right]
    _position_panel(axes[0][0], top_pos, "top exits: positions")
    _law_panel(axes[0][1], top_marks, params.nu_v, "top exits: intensities")
    _position_panel(axes[1][0], right_pos, "right exits: positions")
    _law_panel(axes[1][1], right_marks, params.nu_h, "right exits: intensities")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def census_figure(summaries: list[ReplicaSummary], params: SystemParams,
                  a: float, b: float, path: str) -> str:
    """Observed mean node counts against their expectations."""
    expected = expected_node_counts(params, a, b)
    observed = {
        k: float(np.mean([s.census[k] for s in summaries])) for k in NODE_KINDS
    }
    fig, ax = plt.subplots(figsize=(8, 4))
    xs = np.arange(len(NODE_KINDS))
    ax.bar(xs - 0.2, [observed[k] for k in NODE_KINDS], width=0.4,
           color="#4878cf", label="observed mean")
    ax.bar(xs + 0.2, [expected[k] for k in NODE_KINDS], width=0.4,
           color="#d65f5f", label="expected")
    ax.set_xticks(xs)
    ax.set_xticklabels(NODE_KINDS, fontsize=8)
    ax.set_ylabel("count per drawing")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return path


def report_figures(summaries: list[ReplicaSummary], params: SystemParams,
                   a: float, b: float, prefix: str) -> list[str]:
    """Write the standard figure set; returns the created paths."""
    return [
        exit_figure(summaries, params, f"{prefix}-exits.png"),
        census_figure(summaries, params, a, b, f"{prefix}-census.png"),
    ]
