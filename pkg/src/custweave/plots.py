"""Render benchmark figures next to the CSV output."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .bench import GroupSummary


def _lines(ax, xs, summaries: list[GroupSummary]):
    ax.plot(xs, [s.median_us / 1000 for s in summaries], "o-", label="median")
    ax.plot(xs, [s.p95_us / 1000 for s in summaries], "s--", label="p95")
    ax.set_ylabel("response time (ms)")
    ax.set_ylim(bottom=0)
    ax.grid(True, alpha=0.3)
    ax.legend()


def render_size_figure(summaries: list[GroupSummary], path: str):
    """Response time against model size, one point per size group."""
    groups = sorted((s for s in summaries if s.concurrency == 1),
                    key=lambda s: s.model_size)
    if not groups:
        return
    fig, ax = plt.subplots(figsize=(6, 4))
    _lines(ax, [s.model_size for s in groups], groups)
    ax.set_xlabel("model size (components)")
    ax.set_title("Operation latency vs model size")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_concurrency_figure(summaries: list[GroupSummary], path: str):
    """Response time against the number of concurrent clients."""
    groups = sorted(summaries, key=lambda s: s.concurrency)
    if not groups:
        return
    fig, ax = plt.subplots(figsize=(6, 4))
    _lines(ax, [s.concurrency for s in groups], groups)
    ax.set_xlabel("concurrent clients")
    ax.set_title("Operation latency vs concurrent requests")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
