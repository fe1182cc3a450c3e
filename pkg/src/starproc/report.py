"""Matplotlib renderings for suite reports: timing bars and chart drawings."""

from __future__ import annotations

import csv
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import networkx as nx  # noqa: E402

from .chart import OneChart  # noqa: E402
from .expr import EMPTY_STEP  # noqa: E402

LEVEL_COLOURS = ["#444444", "#2e8b57", "#4169e1", "#ff8c00", "#800080", "#b22222", "#008080"]


def plot_timings(results, path) -> Path:
    fig, ax = plt.subplots(figsize=(8, 4))
    labels = [str(r.number) for r in results]
    secs = [r.seconds for r in results]
    colours = ["#2e8b57" if r.passed and r.in_time else "#b22222" for r in results]
    ax.bar(labels, secs, color=colours)
    ax.scatter(labels, [r.limit for r in results], marker="_", s=400, color="black", label="time limit")
    ax.set_yscale("log")
    ax.set_xlabel("check")
    ax.set_ylabel("seconds")
    ax.legend(loc="upper left")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def draw_chart(c: OneChart, path, marking: dict | None = None, title: str = "") -> Path:
    """Draw ``c`` with a spring layout; dashed edges are 1-transitions."""
    g = nx.MultiDiGraph()
    g.add_nodes_from(c.order)
    for t in sorted(c.transitions):
        g.add_edge(t[0], t[2], label=t[1])
    pos = nx.spring_layout(nx.DiGraph(g), seed=7)
    fig, ax = plt.subplots(figsize=(6, 5))
    colours = ["#ffd39b" if v == c.start else "#dbe9f6" for v in c.order]
    widths = [3.0 if v in c.terminating else 1.0 for v in c.order]
    nx.draw_networkx_nodes(g, pos, nodelist=c.order, node_color=colours, edgecolors="black",
                           linewidths=widths, node_size=650, ax=ax)
    nx.draw_networkx_labels(g, pos, font_size=8, ax=ax)
    for t in sorted(c.transitions):
        src, label, tgt = t
        level = (marking or {}).get(t, 0)
        colour = LEVEL_COLOURS[level % len(LEVEL_COLOURS)]
        style = "dashed" if label == EMPTY_STEP else "solid"
        rad = 0.35 if src == tgt else 0.12
        nx.draw_networkx_edges(g, pos, edgelist=[(src, tgt)], style=style, edge_color=colour,
                               width=2.0 if level else 1.0, connectionstyle=f"arc3,rad={rad}",
                               arrows=True, node_size=650, ax=ax)
    edge_labels = {}
    for src, label, tgt in sorted(c.transitions):
        text = "1" if label == EMPTY_STEP else label
        level = (marking or {}).get((src, label, tgt), 0)
        if level:
            text += f"[{level}]"
        key = (src, tgt)
        edge_labels[key] = f"{edge_labels[key]},{text}" if key in edge_labels else text
    nx.draw_networkx_edge_labels(g, pos, edge_labels=edge_labels, font_size=7, ax=ax)
    ax.set_title(title)
    ax.set_axis_off()
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def write_report(results, directory, charts=()) -> list:
    """Write results.tsv, a timing figure and one drawing per (name, chart, marking)."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    tsv = out / "results.tsv"
    with tsv.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, delimiter="\t", lineterminator="\n")
        writer.writerow(["check", "title", "passed", "seconds", "limit", "detail"])
        for r in results:
            writer.writerow([r.number, r.title, r.passed, f"{r.seconds:.3f}", r.limit, r.detail])
    written.append(tsv)
    written.append(plot_timings(results, out / "timings.png"))
    for name, chart, marking in charts:
        written.append(draw_chart(chart, out / f"{name}.png", marking, title=name))
    return written
