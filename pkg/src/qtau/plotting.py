"""Figures written next to JSON/CSV reports (Agg backend, files only)."""

from __future__ import annotations

from collections import Counter
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

__all__ = ["plot_bench", "plot_report", "plot_series", "figure_path"]


def figure_path(report_path) -> Path:
    return Path(report_path).with_suffix(".png")


def _save(fig, path) -> Path:
    path = Path(path)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def plot_bench(bench: dict, path) -> Path:
    """Per-level timings (cold, warm, assembly) and term counts."""
    levels = bench["levels"]
    w = [lv["weight"] for lv in levels]
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    ax1.semilogy(w, [max(lv["cold_seconds"], 1e-6) for lv in levels], "o-", label="cold")
    ax1.semilogy(w, [max(lv["warm_seconds"], 1e-6) for lv in levels], "s-", label="warm")
    ax1.semilogy(w, [max(lv["assembly_seconds"], 1e-6) for lv in levels], "^-", label="assembly")
    ax1.set_xlabel("weight")
    ax1.set_ylabel("seconds")
    ax1.legend()
    ax2.semilogy(w, [max(lv["terms"], 1) for lv in levels], "o-", label="Q terms")
    ax2.semilogy(w, [max(lv["partitions"], 1) for lv in levels], "s-", label="partitions")
    ax2.set_xlabel("weight")
    ax2.legend()
    return _save(fig, path)


def plot_report(report, path) -> Path:
    """Pass/fail counts per item group."""
    passed, failed = Counter(), Counter()
    for it in report.items:
        (passed if it.passed else failed)[it.group or report.campaign] += 1
    groups = sorted(set(passed) | set(failed))
    fig, ax = plt.subplots(figsize=(max(5, 0.8 * len(groups) + 2), 4))
    x = range(len(groups))
    ax.bar(x, [passed[g] for g in groups], color="tab:green", label="pass")
    ax.bar(x, [failed[g] for g in groups], bottom=[passed[g] for g in groups],
           color="tab:red", label="fail")
    ax.set_xticks(list(x))
    ax.set_xticklabels(groups, rotation=30, ha="right", fontsize=8)
    ax.set_ylabel("items")
    ax.set_title(f"{report.campaign}: {'pass' if report.passed else 'FAIL'}")
    ax.legend()
    return _save(fig, path)


def plot_series(series, path, title: str = "") -> Path:
    """Term count per hbar exponent of a series."""
    items = series.items()
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.bar([float(e) for e, _ in items], [len(p) for _, p in items], width=0.25)
    ax.set_xlabel("hbar exponent")
    ax.set_ylabel("monomials")
    if title:
        ax.set_title(title)
    return _save(fig, path)
