"""Per-component precision/recall/F1 between predicted and gold graphs.

Nodes are aligned by their anchors (the set of non-space characters they
cover), preferring equal labels and then equal yields when several nodes
share anchors. This is
a proxy for the official maximum-common-subgraph matcher and is only
qualitatively comparable to it.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .graph import Graph

COMPONENTS = ("tops", "labels", "properties", "anchors", "edges", "attributes", "all")


class InputMismatch(ValueError):
    pass


@dataclass
class Counts:
    gold: int = 0
    predicted: int = 0
    matched: int = 0

    @property
    def precision(self) -> float:
        return self.matched / self.predicted if self.predicted else 0.0

    @property
    def recall(self) -> float:
        return self.matched / self.gold if self.gold else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0

    @property
    def applicable(self) -> bool:
        return bool(self.gold or self.predicted)

    def __iadd__(self, other: "Counts") -> "Counts":
        self.gold += other.gold
        self.predicted += other.predicted
        self.matched += other.matched
        return self


@dataclass
class ComponentScores:
    counts: dict[str, Counts] = field(default_factory=lambda: {c: Counts() for c in COMPONENTS})

    def f1(self, component: str) -> Optional[float]:
        c = self.counts[component]
        return c.f1 if c.applicable else None

    def applicable(self) -> list[str]:
        return [c for c in COMPONENTS if self.counts[c].applicable]

    def __iadd__(self, other: "ComponentScores") -> "ComponentScores":
        for name in COMPONENTS:
            self.counts[name] += other.counts[name]
        return self


def anchor_chars(g: Graph, anchors) -> frozenset[int]:
    return frozenset(i for start, end in anchors for i in range(start, end) if not g.input[i].isspace())


def anchor_runs(g: Graph, anchors) -> frozenset[tuple[int, int]]:
    """Maximal runs of covered non-space characters, as (start, end) spans."""
    chars = sorted(anchor_chars(g, anchors))
    runs = []
    for i in chars:
        if runs and runs[-1][1] == i:
            runs[-1][1] = i + 1
        else:
            runs.append([i, i + 1])
    return frozenset((a, b) for a, b in runs)


def _yields(g: Graph) -> dict[int, frozenset[int]]:
    """Characters anchored by each node or anything reachable from it."""
    children: dict[int, list[int]] = defaultdict(list)
    for e in g.edges:
        children[e.source].append(e.target)
    own = {n.id: anchor_chars(g, n.anchors) for n in g.nodes}
    result = {}
    for n in g.nodes:
        seen, stack, chars = {n.id}, [n.id], set()
        while stack:
            m = stack.pop()
            chars |= own[m]
            for c in children[m]:
                if c not in seen:
                    seen.add(c)
                    stack.append(c)
        result[n.id] = frozenset(chars)
    return result


def align_nodes(pred: Graph, gold: Graph) -> dict[int, int]:
    """Greedy one-to-one map from predicted to gold node ids.

    Nodes pair up only if they cover exactly the same characters. Among
    such candidates, equal labels are matched first, then equal yields
    (the characters covered by everything reachable from the node), which
    separates unanchored inner nodes.
    """
    if pred.input != gold.input:
        raise InputMismatch(f"graphs {pred.id!r} and {gold.id!r} have different input strings")
    by_anchor: dict[frozenset, list] = defaultdict(list)
    for node in sorted(pred.nodes, key=lambda n: n.id):
        by_anchor[anchor_chars(pred, node.anchors)].append(node)
    pred_yield, gold_yield = _yields(pred), _yields(gold)
    mapping: dict[int, int] = {}
    used: set[int] = set()
    done: set[int] = set()
    golds = sorted(gold.nodes, key=lambda n: n.id)
    for want_label, want_yield in ((True, True), (True, False), (False, True), (False, False)):
        for g in golds:
            if g.id in done:
                continue
            for p in by_anchor.get(anchor_chars(gold, g.anchors), ()):
                if p.id in used or (want_label and p.label != g.label):
                    continue
                if want_yield and pred_yield[p.id] != gold_yield[g.id]:
                    continue
                mapping[p.id] = g.id
                used.add(p.id)
                done.add(g.id)
                break
    return mapping


def _items(g: Graph, ids) -> dict[str, set]:
    items: dict[str, set] = {c: set() for c in COMPONENTS if c != "all"}
    for top in g.tops:
        items["tops"].add(ids(top))
    for node in g.nodes:
        n = ids(node.id)
        if node.label is not None:
            items["labels"].add((n, node.label))
        for name, value in node.properties:
            items["properties"].add((n, name, value))
        for run in anchor_runs(g, node.anchors):
            items["anchors"].add((n, run))
    for edge in g.edges:
        s, t = ids(edge.source), ids(edge.target)
        items["edges"].add((s, t, edge.label))
        for name, value in edge.attributes:
            items["attributes"].add((s, t, edge.label, name, value))
    return items


def score(pred: Graph, gold: Graph) -> ComponentScores:
    mapping = align_nodes(pred, gold)
    gold_items = _items(gold, lambda i: i)
    pred_items = _items(pred, lambda i: mapping.get(i, ("unaligned", i)))
    result = ComponentScores()
    for name, gold_set in gold_items.items():
        pred_set = pred_items[name]
        counts = Counts(len(gold_set), len(pred_set), len(gold_set & pred_set))
        result.counts[name] = counts
        result.counts["all"] += counts
    return result


@dataclass
class CorpusReport:
    per_framework: dict[str, ComponentScores]
    graphs: dict[str, int]

    def macro(self, component: str) -> Optional[tuple[float, float, float]]:
        """Precision, recall and F1 averaged over frameworks where applicable."""
        rows = [s.counts[component] for s in self.per_framework.values() if s.counts[component].applicable]
        if not rows:
            return None
        n = len(rows)
        return (sum(c.precision for c in rows) / n, sum(c.recall for c in rows) / n, sum(c.f1 for c in rows) / n)


def score_corpus(pairs: Iterable[tuple[Graph, Graph]]) -> CorpusReport:
    """Micro-average within each framework (by gold framework)."""
    per_framework: dict[str, ComponentScores] = {}
    graphs: dict[str, int] = defaultdict(int)
    for pred, gold in pairs:
        per_framework.setdefault(gold.framework, ComponentScores())
        per_framework[gold.framework] += score(pred, gold)
        graphs[gold.framework] += 1
    return CorpusReport(dict(sorted(per_framework.items())), dict(sorted(graphs.items())))
