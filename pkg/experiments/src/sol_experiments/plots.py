"""Plotting: always rendered from csv files, never from live training."""

import csv
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _read_csv(path):
    with open(path, newline="", encoding="ascii") as fh:
        return list(csv.DictReader(fh))


def plot_sweep(sweep_csv, out_png, references=None):
    """Sparsity-accuracy trade-off lines, one per algorithm.

    references: optional {label: accuracy} drawn as horizontal dashed
    lines (e.g. published batch-solver numbers), clearly labeled.
    """
    series = defaultdict(list)
    for row in _read_csv(sweep_csv):
        if row["sparsity"] == "" or row["accuracy"] == "":
            continue
        series[row["algo"]].append((float(row["sparsity"]),
                                    float(row["accuracy"])))
    fig, ax = plt.subplots(figsize=(7, 5))
    for algo in sorted(series):
        pts = sorted(series[algo])
        ax.plot([p[0] for p in pts], [p[1] for p in pts],
                marker="o", label=algo)
    for label, acc in (references or {}).items():
        ax.axhline(acc, linestyle="--", linewidth=1, color="gray")
        ax.annotate(f"{label} ({acc:.4f})", xy=(0.02, acc),
                    fontsize=8, color="gray",
                    xytext=(0.02, acc), textcoords="data")
    ax.set_xlabel("model sparsity (1 - nnz/d)")
    ax.set_ylabel("test accuracy")
    ax.set_title("sparse online learners: accuracy vs sparsity")
    ax.legend(fontsize=8)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(out_png, dpi=120)
    plt.close(fig)
    return out_png


def plot_compare(compare_csv, out_png):
    """Accuracy (with std bars) per algorithm from a comparison table."""
    rows = [r for r in _read_csv(compare_csv) if r["accuracy_mean"] != ""]
    algos = [r["algo"] for r in rows]
    means = [float(r["accuracy_mean"]) for r in rows]
    stds = [float(r["accuracy_std"]) for r in rows]
    fig, ax = plt.subplots(figsize=(7, 0.5 + 0.4 * max(len(rows), 1)))
    y = range(len(rows))
    ax.barh(y, means, xerr=stds, color="steelblue", height=0.6)
    ax.set_yticks(list(y), algos, fontsize=8)
    ax.set_xlabel("test accuracy (mean over shuffled repeats)")
    lo = min(means) if means else 0.0
    ax.set_xlim(max(0.0, lo - 0.05), 1.0)
    ax.grid(alpha=0.3, axis="x")
    fig.tight_layout()
    fig.savefig(out_png, dpi=120)
    plt.close(fig)
    return out_png
