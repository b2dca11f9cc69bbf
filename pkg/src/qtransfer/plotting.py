"""Report figures rendered to files alongside the delimited output."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["transfer_figure", "noise_figure", "speedup_figure"]

plt.rcParams.update(
    {
        "figure.figsize": (7.0, 4.5),
        "figure.dpi": 120,
        "axes.grid": True,
        "grid.alpha": 0.3,
        "font.size": 10,
    }
)


def transfer_figure(rows: list[dict], path: str | Path) -> None:
    """Best/worst donor approximation ratios per acceptor (circles vs crosses)."""
    fig, ax = plt.subplots()
    for regime, marker, color in (("nearest", "o", "tab:blue"), ("farthest", "x", "tab:orange")):
        pts = [(r["acceptor_id"], r["r_avg"]) for r in rows if r["regime"] == regime]
        if pts:
            xs, ys = zip(*pts)
            ax.scatter(xs, ys, marker=marker, color=color, label=f"{regime} donor")
    native = [(r["acceptor_id"], r["r_native"]) for r in rows if r.get("r_native") not in (None, "")]
    if native:
        xs, ys = zip(*sorted(set(native)))
        ax.scatter(xs, ys, marker="_", color="tab:green", label="native optimum")
    ax.set_xlabel("acceptor graph id")
    ax.set_ylabel("average transferred approximation ratio")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def noise_figure(aggregates: list[dict], path: str | Path, value_label: str = "delta_e") -> None:
    """Box-style plot of energy errors per noise scale factor."""
    fig, ax = plt.subplots()
    scales = [a["scale"] for a in aggregates]
    positions = np.arange(len(scales))
    for x, agg in zip(positions, aggregates):
        ax.add_patch(
            plt.Rectangle(
                (x - 0.25, agg["q1"]), 0.5, agg["q3"] - agg["q1"],
                fill=True, facecolor="tab:blue", alpha=0.4, edgecolor="black",
            )
        )
        ax.hlines(agg["median"], x - 0.25, x + 0.25, color="black")
        ax.vlines(x, agg["lo_whisker"], agg["q1"], color="black")
        ax.vlines(x, agg["q3"], agg["hi_whisker"], color="black")
        ax.plot(x, agg["mean"], marker="s", color="red")
    ax.set_xticks(positions, [str(s) for s in scales])
    ax.set_xlabel("noise scale factor")
    ax.set_ylabel(value_label)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def speedup_figure(rows: list[dict], path: str | Path) -> None:
    """Wall time vs approximation ratio per optimization regime."""
    fig, ax = plt.subplots()
    for row in rows:
        marker = "x" if row["transferred"] else "o"
        ax.scatter(row["wall_time_s"], row["ratio"], marker=marker)
        ax.annotate(
            row["regime"], (row["wall_time_s"], row["ratio"]),
            textcoords="offset points", xytext=(4, 4), fontsize=8,
        )
    ax.set_xscale("log")
    ax.set_xlabel("wall time (s)")
    ax.set_ylabel("approximation ratio")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
