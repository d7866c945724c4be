# SPDX-License-Identifier: MIT
# Copyright (c) 2026 The geansim authors.

"""SVG plots derived only from emitted report and ablation CSV files."""

import csv
from collections import defaultdict
from typing import Dict, List, Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def read_rows(path) -> List[dict]:
    with open(path, "r", encoding="utf-8", newline="") as f:
        return list(csv.DictReader(f))


def plot_report(csv_path, svg_path, title: Optional[str] = None) -> None:
    """Grouped bars of mean replay error per horizon and provider, with CI whiskers."""
    rows = read_rows(csv_path)
    horizons = sorted({int(r["horizon_steps"]) for r in rows})
    providers = list(dict.fromkeys(r["provider"] for r in rows))
    fig, axes = plt.subplots(1, len(horizons), figsize=(4 * len(horizons), 3.5), squeeze=False)
    for ax, horizon in zip(axes[0], horizons):
        means, lower, upper = [], [], []
        for provider in providers:
            row = next(
                r for r in rows if r["provider"] == provider and int(r["horizon_steps"]) == horizon
            )
            mean = float(row["mean_deg"])
            means.append(mean)
            lower.append(mean - float(row["ci_lo"]))
            upper.append(float(row["ci_hi"]) - mean)
        ax.bar(providers, means, yerr=[lower, upper], capsize=4, color="tab:blue")
        ax.set_title(f"{horizon} steps")
        ax.set_ylabel("position error (deg)")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(svg_path, format="svg")
    plt.close(fig)


def plot_ablation(
    csv_path, svg_path, parameter: str, horizon: int, provider: Optional[str] = None
) -> None:
    """Median over seeds of the mean replay error against a swept parameter.

    Whiskers span the smallest lower and the largest upper CI bound across seeds.
    """
    rows = [r for r in read_rows(csv_path) if int(r["horizon_steps"]) == horizon]
    if provider is not None:
        rows = [r for r in rows if r["provider"] == provider]
    series: Dict[str, Dict[str, List[dict]]] = defaultdict(lambda: defaultdict(list))
    for row in rows:
        series[row["provider"]][row[parameter]].append(row)
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for name, cells in series.items():
        keys = list(cells)
        try:
            keys.sort(key=float)
            x = np.array([float(k) for k in keys])
        except ValueError:
            x = np.arange(len(keys))
            ax.set_xticks(x, keys)
        medians = np.array([np.median([float(r["mean_deg"]) for r in cells[k]]) for k in keys])
        lo = np.array([min(float(r["ci_lo"]) for r in cells[k]) for k in keys])
        hi = np.array([max(float(r["ci_hi"]) for r in cells[k]) for k in keys])
        ax.errorbar(
            x,
            medians,
            yerr=[np.maximum(medians - lo, 0), np.maximum(hi - medians, 0)],
            marker="o",
            capsize=3,
            label=name,
        )
    ax.set_xlabel(parameter.replace("_", " "))
    ax.set_ylabel(f"position error after {horizon} steps (deg)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(svg_path, format="svg")
    plt.close(fig)
