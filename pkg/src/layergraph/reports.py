"""Plain-text and CSV renderings of coverage, encoding and score tables."""

from __future__ import annotations

import csv
import io
from typing import Iterable, Optional

from .encoding import RuleInventory
from .eval import COMPONENTS, ComponentScores, CorpusReport
from .oracle import CoverageReport, CoverageRow

ABSENT = "---"
COMPONENT_TITLES = {
    "tops": "Tops", "labels": "Labels", "properties": "Properties", "anchors": "Anchors",
    "edges": "Edges", "attributes": "Attributes", "all": "All",
}


def percent(value: Optional[float]) -> str:
    return ABSENT if value is None else f"{100 * value:.2f}%"


def _text_table(rows: list[list[str]], right_from: int = 1) -> str:
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    lines = []
    for n, row in enumerate(rows):
        cells = [cell.rjust(w) if i >= right_from else cell.ljust(w) for i, (cell, w) in enumerate(zip(row, widths))]
        lines.append("  ".join(cells).rstrip())
        if n == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def _csv(rows: Iterable[list]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerows(rows)
    return out.getvalue()


# -- coverage ---------------------------------------------------------------

def _coverage_rows(report: CoverageReport) -> list[tuple[str, CoverageRow]]:
    rows = [(name.upper(), row) for name, row in report.per_framework.items()]
    if len(rows) != 1:
        rows.append(("ALL", report.total))
    return rows


def coverage_text(report: CoverageReport) -> str:
    header = ["Framework", ""] + [str(i) for i in range(1, report.max_iterations + 1)]
    rows = [header]
    for name, row in _coverage_rows(report):
        rows.append([name, "Nodes"] + [percent(v) for v in row.node_coverage])
        rows.append(["", "Graphs"] + [percent(v) for v in row.graph_coverage])
    return _text_table(rows, right_from=2)


def coverage_csv(report: CoverageReport) -> str:
    rows = [["framework", "row"] + [f"iteration_{i}" for i in range(1, report.max_iterations + 1)]]
    for name, row in _coverage_rows(report):
        rows.append([name.lower(), "nodes"] + [f"{v:.6f}" for v in row.node_coverage])
        rows.append([name.lower(), "graphs"] + [f"{v:.6f}" for v in row.graph_coverage])
    return _csv(rows)


# -- encoding ---------------------------------------------------------------

def encoding_text(inventories: dict[str, dict[str, RuleInventory]]) -> str:
    """``inventories`` maps framework -> property -> inventory. ``*`` marks the chosen mode."""
    rows = [["Framework", "Property", "Absolute", "Relative", "Mode"]]
    for framework, by_name in inventories.items():
        if not by_name:
            rows.append([framework.upper(), ABSENT, ABSENT, ABSENT, ABSENT])
            continue
        for i, (name, inv) in enumerate(by_name.items()):
            mark_abs = "*" if inv.mode == "absolute" else ""
            mark_rel = "*" if inv.mode == "relative" else ""
            rows.append([
                framework.upper() if i == 0 else "", name,
                f"{inv.absolute_count}{mark_abs}", f"{inv.relative_count}{mark_rel}", inv.mode,
            ])
    return _text_table(rows, right_from=2)


def encoding_csv(inventories: dict[str, dict[str, RuleInventory]]) -> str:
    rows = [["framework", "property", "absolute", "relative", "mode"]]
    for framework, by_name in inventories.items():
        for name, inv in by_name.items():
            rows.append([framework, name, inv.absolute_count, inv.relative_count, inv.mode])
    return _csv(rows)


# -- scores -----------------------------------------------------------------

def _score_cells(scores: ComponentScores) -> list[str]:
    return [percent(scores.f1(c)) for c in COMPONENTS]


def score_text(report: CorpusReport) -> str:
    rows = [["Framework", "Graphs"] + [COMPONENT_TITLES[c] for c in COMPONENTS]]
    for framework, scores in report.per_framework.items():
        rows.append([framework.upper(), str(report.graphs[framework])] + _score_cells(scores))
    if len(report.per_framework) > 1:
        macro = [report.macro(c) for c in COMPONENTS]
        rows.append(["MACRO", str(sum(report.graphs.values()))] + [percent(m[2] if m else None) for m in macro])
    return _text_table(rows)


def score_csv(report: CorpusReport) -> str:
    rows = [["framework", "component", "gold", "predicted", "matched", "precision", "recall", "f1"]]
    for framework, scores in report.per_framework.items():
        for c in scores.applicable():
            n = scores.counts[c]
            rows.append([framework, c, n.gold, n.predicted, n.matched,
                         f"{n.precision:.6f}", f"{n.recall:.6f}", f"{n.f1:.6f}"])
    for c in COMPONENTS:
        m = report.macro(c)
        if m is not None:
            rows.append(["macro", c, "", "", "", f"{m[0]:.6f}", f"{m[1]:.6f}", f"{m[2]:.6f}"])
    return _csv(rows)
