"""Layered AddNodes/AddEdges scripts: extraction from gold graphs, replay, coverage.

Every iteration visits the frozen nodes in creation order (tokens first,
left to right). Each visited node may create one not-yet-created gold
neighbour, the one with the fewest token descendants, ties broken by the
smaller sorted list of descendant token indices and then by gold id.
The new node becomes a parent of its origin whenever the gold graph has
that edge. AddEdges then emits every gold edge whose endpoints both exist.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable, Optional, Sequence

from .graph import Pairs
from .tokenizer import Token
from .uniform import SEMANTIC, TOKEN, UEdge, UNode, UniformGraph

PARENT = "Parent"
CHILD = "Child"
NOTHING = "Nothing"

# default inference budgets; "auto" extracts until AddNodes stalls
ITERATION_BUDGETS = {"dm": 1, "psd": 1, "eds": 3, "ucca": 2, "amr": 2}
AUTO_LIMIT = 50


class IsolatedComponent(ValueError):
    def __init__(self, graph_id: str, ids: Sequence[int]):
        self.graph_id = graph_id
        self.ids = tuple(ids)
        super().__init__(f"graph {graph_id!r}: nodes {list(self.ids)} cannot be reached from any token")


class DanglingReference(ValueError):
    pass


@dataclass(frozen=True)
class AddNodeOp:
    origin: int
    direction: str
    label: Optional[str] = None
    properties: Pairs = ()


@dataclass(frozen=True)
class IterationOps:
    add_nodes: tuple[AddNodeOp, ...] = ()
    add_edges: tuple[UEdge, ...] = ()


@dataclass(frozen=True)
class OperationScript:
    """Ids are creation ids: tokens ``0..T-1``, then nodes in creation order."""

    graph_id: str
    tokens: tuple[Token, ...]
    iterations: tuple[IterationOps, ...]
    tops: frozenset[int] = frozenset()
    framework: str = ""
    input: str = ""
    virtual_root: bool = False
    # creation id -> gold node id, for the graph the script was extracted from
    gold_ids: tuple[int, ...] = ()

    @property
    def node_count(self) -> int:
        return len(self.tokens) + sum(len(it.add_nodes) for it in self.iterations)


def node_order(u: UniformGraph, created: Iterable[int]) -> list[int]:
    """Token nodes left to right, then the remaining nodes by creation time."""
    nodes = u.node_map()
    created = list(created)
    tokens = sorted((i for i in created if nodes[i].kind == TOKEN), key=lambda i: nodes[i].token_ref)
    return tokens + [i for i in created if nodes[i].kind != TOKEN]


def descendant_tokens(u: UniformGraph) -> dict[int, frozenset[int]]:
    """Token indices reachable from each node along edge direction."""
    children: dict[int, list[int]] = {n.id: [] for n in u.nodes}
    for e in u.edges:
        children[e.source].append(e.target)
    token_ref = {n.id: n.token_ref for n in u.nodes if n.kind == TOKEN}
    result = {}
    for n in u.nodes:
        seen = {n.id}
        stack = list(children[n.id])
        found = set()
        while stack:
            m = stack.pop()
            if m in seen:
                continue
            seen.add(m)
            if m in token_ref:
                found.add(token_ref[m])
            stack.extend(children[m])
        result[n.id] = frozenset(found)
    return result


def token_descendants(u: UniformGraph, n: int) -> int:
    return len(descendant_tokens(u)[n])


def _unreachable(u: UniformGraph) -> list[int]:
    adj: dict[int, set[int]] = {n.id: set() for n in u.nodes}
    for e in u.edges:
        adj[e.source].add(e.target)
        adj[e.target].add(e.source)
    seen = {n.id for n in u.nodes if n.kind == TOKEN}
    stack = list(seen)
    while stack:
        for m in adj[stack.pop()]:
            if m not in seen:
                seen.add(m)
                stack.append(m)
    return [n.id for n in u.nodes if n.id not in seen]


@dataclass
class _Extraction:
    script: OperationScript
    created_per_iteration: list[int]
    semantic_total: int
    unreachable: list[int]

    @property
    def covered(self) -> bool:
        return sum(self.created_per_iteration) == self.semantic_total


def _extract(u: UniformGraph, max_iterations: int) -> _Extraction:
    nodes = u.node_map()
    parents: dict[int, set[int]] = {n.id: set() for n in u.nodes}
    neighbours: dict[int, set[int]] = {n.id: set() for n in u.nodes}
    for e in u.edges:
        parents[e.target].add(e.source)
        neighbours[e.source].add(e.target)
        neighbours[e.target].add(e.source)
    desc = descendant_tokens(u)
    rank = {m: (len(d), sorted(d), m) for m, d in desc.items()}

    order = node_order(u, [n.id for n in u.nodes if n.kind == TOKEN])
    created = set(order)
    semantic_total = sum(1 for n in u.nodes if n.kind == SEMANTIC)
    emitted: set[int] = set()
    iterations: list[IterationOps] = []
    counts: list[int] = []

    for _ in range(max_iterations):
        if len(created) == len(nodes):
            break
        claimed: set[int] = set()
        chosen: list[tuple[int, int, str]] = []
        for origin in list(order):
            options = [m for m in neighbours[origin] if m not in created and m not in claimed]
            if not options:
                continue
            best = min(options, key=rank.__getitem__)
            claimed.add(best)
            chosen.append((origin, best, PARENT if best in parents[origin] else CHILD))
        if not chosen:
            break
        order.extend(best for _, best, _ in chosen)
        created.update(claimed)
        cid = {gold: i for i, gold in enumerate(order)}

        ops = tuple(
            AddNodeOp(cid[origin], direction, nodes[best].label, nodes[best].properties)
            for origin, best, direction in chosen
        )
        fresh = []
        for index, e in enumerate(u.edges):
            if index not in emitted and e.source in created and e.target in created:
                emitted.add(index)
                fresh.append(UEdge(cid[e.source], cid[e.target], e.label, e.attributes))
        fresh.sort(key=lambda e: (e.source, e.target, e.label or ""))
        iterations.append(IterationOps(ops, tuple(fresh)))
        counts.append(len(chosen))

    cid = {gold: i for i, gold in enumerate(order)}
    script = OperationScript(
        graph_id=u.id,
        tokens=u.tokens,
        iterations=tuple(iterations),
        tops=frozenset(cid[t] for t in u.tops if t in cid),
        framework=u.framework,
        input=u.input,
        virtual_root=u.virtual_root,
        gold_ids=tuple(order),
    )
    return _Extraction(script, counts, semantic_total, _unreachable(u))


def extract_script(u: UniformGraph, max_iterations: int) -> tuple[OperationScript, bool]:
    """Extract the layered operation script of a gold uniform graph.

    Returns the script and whether every gold node was created within
    ``max_iterations``. Raises :class:`IsolatedComponent` if some nodes
    have no undirected path to a token.
    """
    if max_iterations < 1:
        raise ValueError("max_iterations must be at least 1")
    result = _extract(u, max_iterations)
    if result.unreachable:
        raise IsolatedComponent(u.id, result.unreachable)
    return result.script, result.covered


def replay(tokens: Sequence[Token], script: OperationScript) -> UniformGraph:
    """Build the uniform graph described by ``script`` starting from ``tokens``."""
    nodes = [UNode(t.index, TOKEN, token_ref=t.index) for t in tokens]
    edges: list[UEdge] = []
    pairs: set[tuple[int, int]] = set()
    for number, iteration in enumerate(script.iterations, 1):
        frozen = len(nodes)
        implied = []
        for op in iteration.add_nodes:
            if not 0 <= op.origin < frozen:
                raise DanglingReference(f"iteration {number}: AddNodes origin {op.origin} does not exist")
            new = len(nodes)
            nodes.append(UNode(new, SEMANTIC, op.label, op.properties))
            implied.append((new, op.origin) if op.direction == PARENT else (op.origin, new))
        for e in iteration.add_edges:
            if not (0 <= e.source < len(nodes) and 0 <= e.target < len(nodes)):
                raise DanglingReference(f"iteration {number}: edge {e.source}->{e.target} cites a missing node")
            edges.append(e)
            pairs.add((e.source, e.target))
        for source, target in implied:
            if (source, target) not in pairs:
                edges.append(UEdge(source, target))
                pairs.add((source, target))
    for top in script.tops:
        if not 0 <= top < len(nodes):
            raise DanglingReference(f"top {top} does not exist")
    return UniformGraph(
        id=script.graph_id,
        framework=script.framework,
        input=script.input,
        tokens=tuple(tokens),
        nodes=tuple(nodes),
        edges=tuple(edges),
        tops=script.tops,
        virtual_root=script.virtual_root,
    )


def canonical_form(u: UniformGraph, max_iterations: int = AUTO_LIMIT) -> tuple:
    """Id-free description of ``u`` under the creation-order labelling.

    Two graphs with equal canonical forms are isomorphic. Raises
    ``ValueError`` for graphs that cannot be fully extracted.
    """
    result = _extract(u, max_iterations)
    if result.unreachable or not result.covered:
        raise ValueError(f"graph {u.id!r} is not fully reachable by the oracle")
    cid = {gold: i for i, gold in enumerate(result.script.gold_ids)}
    nodes = u.node_map()
    node_part = tuple(
        (cid[g], nodes[g].kind, nodes[g].token_ref, nodes[g].label, nodes[g].properties)
        for g in result.script.gold_ids
    )
    edge_part = tuple(sorted(
        ((cid[e.source], cid[e.target], e.label or "", e.attributes) for e in u.edges),
    ))
    tokens = tuple((t.form, t.start, t.end) for t in u.tokens)
    return tokens, node_part, edge_part, tuple(sorted(cid[t] for t in u.tops))


# -- coverage -------------------------------------------------------------

@dataclass
class CoverageRow:
    framework: str
    graphs: int = 0
    nodes: int = 0
    nodes_created: list[int] = field(default_factory=list)
    graphs_complete: list[int] = field(default_factory=list)

    def add(self, other: "CoverageRow") -> None:
        self.graphs += other.graphs
        self.nodes += other.nodes
        for mine, theirs in ((self.nodes_created, other.nodes_created), (self.graphs_complete, other.graphs_complete)):
            if not mine:
                mine.extend([0] * len(theirs))
            for i, value in enumerate(theirs):
                mine[i] += value

    @property
    def node_coverage(self) -> list[float]:
        return [c / self.nodes if self.nodes else 1.0 for c in self.nodes_created]

    @property
    def graph_coverage(self) -> list[float]:
        return [c / self.graphs if self.graphs else 1.0 for c in self.graphs_complete]


@dataclass
class CoverageReport:
    max_iterations: int
    total: CoverageRow
    per_framework: dict[str, CoverageRow]
    warnings: list[str] = field(default_factory=list)

    @property
    def node_coverage(self) -> list[float]:
        return self.total.node_coverage

    @property
    def graph_coverage(self) -> list[float]:
        return self.total.graph_coverage


def graph_coverage_row(u: UniformGraph, max_iterations: int) -> tuple[CoverageRow, Optional[str]]:
    """Coverage counters for a single graph plus an optional warning."""
    result = _extract(u, max_iterations)
    warning = None
    if result.unreachable:
        warning = str(IsolatedComponent(u.id, result.unreachable))
    created, running, complete = [], 0, []
    for i in range(max_iterations):
        running += result.created_per_iteration[i] if i < len(result.created_per_iteration) else 0
        created.append(running)
        complete.append(int(running == result.semantic_total))
    row = CoverageRow(u.framework, 1, result.semantic_total, created, complete)
    return row, warning


def coverage(corpus: Iterable[UniformGraph], max_iterations: int,
             exclude_isolated: bool = False, rows: Optional[Iterable] = None) -> CoverageReport:
    """Cumulative node and graph coverage after each of ``max_iterations``.

    Graphs with unreachable nodes produce a warning; they count as never
    complete unless ``exclude_isolated`` drops them entirely. ``rows`` may
    carry precomputed :func:`graph_coverage_row` results (parallel callers).
    """
    if rows is None:
        rows = (graph_coverage_row(u, max_iterations) for u in corpus)
    total = CoverageRow("all", 0, 0, [0] * max_iterations, [0] * max_iterations)
    per_framework: dict[str, CoverageRow] = {}
    warnings = []
    for row, warning in rows:
        if warning:
            warnings.append(warning)
            if exclude_isolated:
                continue
        total.add(row)
        per_framework.setdefault(row.framework, CoverageRow(row.framework)).add(row)
    return CoverageReport(max_iterations, total, dict(sorted(per_framework.items())), warnings)


# -- JSON-lines wire form -------------------------------------------------

def _edge_dict(e: UEdge) -> dict:
    raw: dict[str, Any] = {"source": e.source, "target": e.target}
    if e.label is not None:
        raw["label"] = e.label
    if e.attributes:
        raw["attributes"] = [k for k, _ in e.attributes]
        raw["values"] = [v for _, v in e.attributes]
    return raw


def script_to_dict(script: OperationScript, covered: Optional[bool] = None) -> dict:
    out: dict[str, Any] = {"id": script.graph_id, "framework": script.framework, "input": script.input}
    out["tokens"] = [{"form": t.form, "start": t.start, "end": t.end} for t in script.tokens]
    if script.virtual_root:
        out["virtual_root"] = True
    iterations = []
    for it in script.iterations:
        ops = []
        for op in it.add_nodes:
            raw: dict[str, Any] = {"origin": op.origin, "direction": op.direction}
            if op.label is not None:
                raw["label"] = op.label
            if op.properties:
                raw["properties"] = [k for k, _ in op.properties]
                raw["values"] = [v for _, v in op.properties]
            ops.append(raw)
        iterations.append({"add_nodes": ops, "add_edges": [_edge_dict(e) for e in it.add_edges]})
    out["iterations"] = iterations
    out["tops"] = sorted(script.tops)
    out["gold_ids"] = list(script.gold_ids)
    if covered is not None:
        out["covered"] = covered
    return out


def script_from_dict(obj: dict) -> OperationScript:
    def pairs(raw, key):
        return tuple(zip(raw.get(key) or [], raw.get("values") or []))

    iterations = tuple(
        IterationOps(
            tuple(AddNodeOp(o["origin"], o["direction"], o.get("label"), pairs(o, "properties")) for o in it["add_nodes"]),
            tuple(UEdge(e["source"], e["target"], e.get("label"), pairs(e, "attributes")) for e in it["add_edges"]),
        )
        for it in obj["iterations"]
    )
    return OperationScript(
        graph_id=obj["id"],
        tokens=tuple(Token(i, t["form"], t["start"], t["end"]) for i, t in enumerate(obj["tokens"])),
        iterations=iterations,
        tops=frozenset(obj.get("tops") or []),
        framework=obj.get("framework", ""),
        input=obj.get("input", ""),
        virtual_root=bool(obj.get("virtual_root")),
        gold_ids=tuple(obj.get("gold_ids") or []),
    )


def serialize_script(script: OperationScript, covered: Optional[bool] = None) -> str:
    return json.dumps(script_to_dict(script, covered), ensure_ascii=False, separators=(",", ":"))


def parse_script(text: str) -> OperationScript:
    return script_from_dict(json.loads(text))
