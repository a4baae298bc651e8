"""Figure rendering for call graphs and score reports.

Graphs are laid out in layers by breadth-first depth from the root nodes and
drawn with plain matplotlib annotations, so identical inputs always produce
the same picture.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .callgraph import MetricsReport


def _layered_layout(graph: dict[str, list[str]]) -> dict[str, tuple[float, float]]:
    indegree: dict[str, int] = {n: 0 for n in graph}
    for callees in graph.values():
        for callee in callees:
            indegree[callee] = indegree.get(callee, 0) + 1
    roots = sorted(n for n, d in indegree.items() if d == 0) or sorted(graph)
    depth: dict[str, int] = {}
    queue = [(r, 0) for r in roots]
    while queue:
        node, d = queue.pop(0)
        if node in depth:
            continue
        depth[node] = d
        for nxt in graph.get(node, []):
            if nxt not in depth:
                queue.append((nxt, d + 1))
    for node in sorted(graph):
        depth.setdefault(node, 0)
    layers: dict[int, list[str]] = {}
    for node, d in depth.items():
        layers.setdefault(d, []).append(node)
    positions: dict[str, tuple[float, float]] = {}
    for d, nodes in sorted(layers.items()):
        nodes.sort()
        for i, node in enumerate(nodes):
            positions[node] = (float(i - (len(nodes) - 1) / 2.0), float(-d))
    return positions


def render_call_graph(graph: dict[str, list[str]], path: Path, title: str = "") -> None:
    """Draw an adjacency graph to an image file."""
    positions = _layered_layout(graph)
    n = max(len(graph), 1)
    fig, ax = plt.subplots(figsize=(max(6.0, n * 1.1), max(4.0, n * 0.5)))
    for caller, callees in sorted(graph.items()):
        x0, y0 = positions[caller]
        for callee in callees:
            x1, y1 = positions[callee]
            ax.annotate(
                "",
                xy=(x1, y1 + 0.12),
                xytext=(x0, y0 - 0.12),
                arrowprops=dict(arrowstyle="-|>", color="dimgray", lw=1.0),
            )
    for node, (x, y) in sorted(positions.items()):
        ax.text(
            x,
            y,
            node,
            ha="center",
            va="center",
            fontsize=8,
            bbox=dict(boxstyle="round,pad=0.35", fc="#dce9f5", ec="#4878a8"),
        )
    ax.set_axis_off()
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_metrics(report: MetricsReport, path: Path, title: str = "") -> None:
    """Bar chart of precision/recall with TP/FP/FN counts."""
    fig, (left, right) = plt.subplots(1, 2, figsize=(8, 3.5))
    left.bar(["precision", "recall"], [report.precision, report.recall], color=["#4878a8", "#6aa36a"])
    left.set_ylim(0.0, 1.05)
    for i, value in enumerate([report.precision, report.recall]):
        left.text(i, value + 0.02, f"{value:.2f}", ha="center", fontsize=9)
    right.bar(
        ["TP", "FP", "FN"],
        [len(report.tp), len(report.fp), len(report.fn)],
        color=["#6aa36a", "#b05050", "#c9a227"],
    )
    right.set_ylabel("edges")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
