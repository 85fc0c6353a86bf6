"""Figures for the report commands, rendered off-screen to image files."""

from __future__ import annotations

from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

from .encoding import RuleInventory
from .eval import COMPONENTS, CorpusReport
from .oracle import CoverageReport
from .reports import COMPONENT_TITLES


def _save(fig: Figure, path: str) -> None:
    FigureCanvasAgg(fig)
    fig.tight_layout()
    # fixed metadata keeps repeated renders byte-identical
    fig.savefig(path, dpi=100, metadata={"Software": None})


def coverage_figure(report: CoverageReport, path: str) -> None:
    fig = Figure(figsize=(7, 3.5))
    nodes_ax, graphs_ax = fig.subplots(1, 2, sharey=True)
    xs = list(range(1, report.max_iterations + 1))
    for name, row in report.per_framework.items():
        nodes_ax.plot(xs, [100 * v for v in row.node_coverage], marker="o", label=name.upper())
        graphs_ax.plot(xs, [100 * v for v in row.graph_coverage], marker="o", label=name.upper())
    for ax, title in ((nodes_ax, "Nodes"), (graphs_ax, "Graphs")):
        ax.set_title(title)
        ax.set_xlabel("iteration")
        ax.set_xticks(xs)
        ax.set_ylim(0, 102)
        ax.grid(alpha=0.3)
    nodes_ax.set_ylabel("covered (%)")
    graphs_ax.legend(loc="lower right", fontsize="small")
    _save(fig, path)


def encoding_figure(inventories: dict[str, dict[str, RuleInventory]], path: str) -> None:
    names = [(fw, prop) for fw, by_name in inventories.items() for prop in by_name]
    fig = Figure(figsize=(max(4, 0.6 * len(names) + 2), 3.5))
    ax = fig.subplots()
    xs = range(len(names))
    absolute = [inventories[fw][p].absolute_count for fw, p in names]
    relative = [inventories[fw][p].relative_count for fw, p in names]
    ax.bar([x - 0.2 for x in xs], absolute, width=0.4, label="absolute")
    ax.bar([x + 0.2 for x in xs], relative, width=0.4, label="relative")
    ax.set_xticks(list(xs))
    ax.set_xticklabels([f"{fw}:{p}" for fw, p in names], rotation=45, ha="right")
    ax.set_ylabel("classes")
    ax.legend(fontsize="small")
    _save(fig, path)


def score_figure(report: CorpusReport, path: str) -> None:
    frameworks = list(report.per_framework)
    fig = Figure(figsize=(7, 3.5))
    ax = fig.subplots()
    width = 0.8 / max(len(frameworks), 1)
    for i, fw in enumerate(frameworks):
        scores = report.per_framework[fw]
        values = [100 * (scores.f1(c) or 0.0) for c in COMPONENTS]
        ax.bar([x + (i - (len(frameworks) - 1) / 2) * width for x in range(len(COMPONENTS))], values,
               width=width, label=fw.upper())
    ax.set_xticks(range(len(COMPONENTS)))
    ax.set_xticklabels([COMPONENT_TITLES[c] for c in COMPONENTS])
    ax.set_ylabel("F1 (%)")
    ax.set_ylim(0, 105)
    ax.legend(fontsize="small")
    _save(fig, path)
