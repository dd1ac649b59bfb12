"""Figure rendering for reports; matplotlib is imported lazily with Agg."""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np


def _plt():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def save_zscore_chart(report, path: str) -> None:
    """Horizontal bar chart of per-ordering z-scores, both statistics."""
    plt = _plt()
    rows = [r for r in report.rows if r.z_descents is not None]
    if not rows:
        return
    labels = [r.ordering for r in rows]
    z_des = [r.z_descents for r in rows]
    z_inv = [r.z_inversions for r in rows]
    y = np.arange(len(rows))
    height = 0.4
    fig, ax = plt.subplots(figsize=(8.0, max(3.0, 0.38 * len(rows) + 1.2)))
    ax.barh(y + height / 2, z_des, height=height, label="descents", color="#4878d0")
    ax.barh(y - height / 2, z_inv, height=height, label="inversions", color="#ee854a")
    ax.set_yticks(y)
    ax.set_yticklabels(labels, fontsize=8)
    ax.invert_yaxis()
    ax.axvline(0.0, color="black", linewidth=0.8)
    ax.set_xlabel("z-score")
    ax.set_title("Normalized statistics by ordering")
    ax.legend(loc="best", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_histogram_chart(
    edges: Sequence[float],
    counts: Sequence[int],
    mu: float,
    sigma: float,
    path: str,
    title: str,
) -> None:
    """Histogram of sampled values with the matching normal density."""
    plt = _plt()
    edges = np.asarray(edges, dtype=np.float64)
    counts = np.asarray(counts, dtype=np.float64)
    total = counts.sum()
    if total <= 0:
        return
    widths = np.diff(edges)
    density = counts / total / np.where(widths > 0, widths, 1.0)
    centers = (edges[:-1] + edges[1:]) / 2
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    ax.bar(centers, density, width=widths, color="#4878d0", alpha=0.7, label="samples")
    grid = np.linspace(edges[0], edges[-1], 400)
    pdf = np.exp(-((grid - mu) ** 2) / (2 * sigma**2)) / (sigma * math.sqrt(2 * math.pi))
    ax.plot(grid, pdf, color="#d65f5f", linewidth=1.5, label="normal approximation")
    ax.set_xlabel("statistic value")
    ax.set_ylabel("density")
    ax.set_title(title)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
