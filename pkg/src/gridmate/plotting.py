"""Figure rendering for the report-producing CLI paths.

Both entry points write a PNG next to the delimited output so a report
directory is self-contained: a signed horizontal bar chart of
per-channel attributions, and an Elo ladder with standard-error bars.
Headless backend; nothing here opens a window.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def channel_attribution_figure(report, target: str, path) -> None:
    """Horizontal bars, one per channel, in layout order top to bottom."""
    names = [name for name, _ in report]
    means = [mean for _, mean in report]
    colors = ["#2e7d32" if m >= 0 else "#c62828" for m in means]
    fig, ax = plt.subplots(figsize=(8, max(4.0, 0.22 * len(report))))
    positions = range(len(report) - 1, -1, -1)
    ax.barh(positions, means, color=colors)
    ax.set_yticks(list(positions))
    ax.set_yticklabels(names, fontsize=7)
    ax.axvline(0.0, color="black", linewidth=0.8)
    ax.set_xlabel(f"mean attribution (target {target})")
    ax.set_title("Channel attributions")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def elo_ladder_figure(ratings: dict, path) -> None:
    """Elo per engine with stderr bars; unrated engines are skipped."""
    rated = [(name, est) for name, est in ratings.items() if est is not None]
    rated.sort(key=lambda item: item[1].elo)
    names = [name for name, _ in rated]
    elos = [est.elo for _, est in rated]
    errs = [0.0 if est.stderr != est.stderr or est.stderr == float("inf")
            else est.stderr for _, est in rated]
    fig, ax = plt.subplots(figsize=(7, max(3.0, 0.6 * len(rated))))
    ax.errorbar(elos, range(len(rated)), xerr=errs, fmt="o", capsize=4,
                color="#1565c0")
    ax.set_yticks(range(len(rated)))
    ax.set_yticklabels(names)
    ax.axvline(0.0, color="black", linewidth=0.8)
    ax.set_xlabel("Elo difference vs baseline")
    ax.set_title("Round-robin Elo ladder")
    for y, (name, est) in enumerate(rated):
        label = "saturated" if est.saturated else f"{est.elo:+.0f}"
        ax.annotate(label, (est.elo, y), textcoords="offset points",
                    xytext=(6, 6), fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
