"""Bar-chart rendering for axis summaries.

One figure per summarized axis, written next to the delimited output.
Uses the Agg backend so rendering works headless.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .harness import display_percent

AXIS_LABELS = {
    "train_size": "Training documents",
    "topic_count": "Topics",
    "iterations": "EM iterations",
    "classifier": "Classifier",
}


def render_axis_summary(axis, pairs, path):
    """Render (axis value, mean accuracy) pairs as a labeled bar chart."""
    if axis not in AXIS_LABELS:
        raise ValueError(f"unknown axis {axis!r}; expected one of {tuple(AXIS_LABELS)}")
    if not pairs:
        raise ValueError("no summary rows to plot")
    labels = [str(key) for key, _ in pairs]
    values = [mean for _, mean in pairs]
    fig, ax = plt.subplots(figsize=(max(4.0, 1.2 * len(pairs) + 2.0), 3.6))
    bars = ax.bar(labels, values, color="#4878cf", width=0.6)
    for bar, value in zip(bars, values):
        ax.annotate(
            f"{display_percent(value)}%",
            xy=(bar.get_x() + bar.get_width() / 2, bar.get_height()),
            xytext=(0, 3), textcoords="offset points",
            ha="center", va="bottom", fontsize=9,
        )
    ax.set_xlabel(AXIS_LABELS[axis])
    ax.set_ylabel("Mean accuracy (%)")
    ax.set_ylim(0, 100)
    ax.yaxis.grid(True, linestyle=":", alpha=0.5)
    ax.set_axisbelow(True)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
