"""Uniform graphs: tokens become nodes and anchors become ordinary edges.

Token nodes come first (ids ``0..T-1`` in token order), semantic nodes
follow. An anchor is an edge from a semantic node to a token node
labelled :data:`~layergraph.graph.ANCHOR_LABEL`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Iterable, Optional

from .graph import ANCHOR_LABEL, Edge, Extras, Graph, Node, Pairs
from .tokenizer import Token

TOKEN = "token"
SEMANTIC = "semantic"


class AnchorMismatch(ValueError):
    def __init__(self, graph_id: str, node: int, span: tuple[int, int]):
        self.graph_id = graph_id
        self.node = node
        self.span = span
        super().__init__(f"graph {graph_id!r}: anchor [{span[0]},{span[1]}) of node {node} does not match token boundaries")


@dataclass(frozen=True)
class UNode:
    id: int
    kind: str
    label: Optional[str] = None
    properties: Pairs = ()
    token_ref: Optional[int] = None
    orig_id: Optional[int] = None
    # how the original anchors grouped tokens; only a layout hint for deuniformize
    anchor_groups: Optional[tuple[tuple[int, ...], ...]] = None
    extras: Extras = ()


@dataclass(frozen=True)
class UEdge:
    source: int
    target: int
    label: Optional[str] = None
    attributes: Pairs = ()
    extras: Extras = ()

    @property
    def key(self) -> tuple[int, int, Optional[str]]:
        return (self.source, self.target, self.label)

    @property
    def is_anchor(self) -> bool:
        return self.label == ANCHOR_LABEL


@dataclass(frozen=True)
class UniformGraph:
    id: str
    framework: str
    input: str
    tokens: tuple[Token, ...]
    nodes: tuple[UNode, ...]
    edges: tuple[UEdge, ...] = ()
    tops: frozenset[int] = frozenset()
    flavor: Optional[int] = None
    virtual_root: bool = False
    extras: Extras = ()

    @property
    def semantic_nodes(self) -> list[UNode]:
        return [n for n in self.nodes if n.kind == SEMANTIC]

    def node_map(self) -> dict[int, UNode]:
        return {n.id: n for n in self.nodes}


def virtual_token() -> Token:
    return Token(0, "", 0, 0)


def with_virtual_root(tokens: Iterable[Token]) -> tuple[Token, ...]:
    shifted = [Token(t.index + 1, t.form, t.start, t.end) for t in tokens]
    return (virtual_token(), *shifted)


def _anchored_tokens(g: Graph, node: Node, tokens: tuple[Token, ...], offset: int) -> tuple[tuple[int, ...], ...]:
    groups = []
    for start, end in node.anchors:
        inside = []
        for t in tokens[offset:]:
            if t.end <= start or t.start >= end:
                continue
            if t.start < start or t.end > end:
                raise AnchorMismatch(g.id, node.id, (start, end))
            inside.append(t.index)
        if not inside:
            raise AnchorMismatch(g.id, node.id, (start, end))
        groups.append(tuple(inside))
    return tuple(groups)


def _anchorless_components(g: Graph) -> set[int]:
    """Ids of nodes whose weakly connected component has no anchored node."""
    adj: dict[int, set[int]] = {n.id: set() for n in g.nodes}
    for e in g.edges:
        adj[e.source].add(e.target)
        adj[e.target].add(e.source)
    anchored = {n.id for n in g.nodes if n.anchors}
    result: set[int] = set()
    seen: set[int] = set()
    for n in g.nodes:
        if n.id in seen:
            continue
        component, stack = {n.id}, [n.id]
        while stack:
            for m in adj[stack.pop()]:
                if m not in component:
                    component.add(m)
                    stack.append(m)
        seen |= component
        if not component & anchored:
            result |= component
    return result


def uniformize(g: Graph, tokens: Iterable[Token], allow_unanchored: bool = False) -> UniformGraph:
    """Turn an anchored graph into its uniform form over ``tokens``.

    With ``allow_unanchored`` a virtual root token is placed at position 0
    (real token indices shift by one) and every node of a component that
    has no anchored node gets an anchor edge to it.
    """
    tokens = tuple(tokens)
    floating = _anchorless_components(g) if allow_unanchored else set()
    virtual = allow_unanchored
    offset = 1 if virtual else 0
    if virtual:
        tokens = with_virtual_root(tokens)

    nodes: list[UNode] = [UNode(t.index, TOKEN, token_ref=t.index) for t in tokens]
    base = len(tokens)
    ids = {node.id: base + i for i, node in enumerate(g.nodes)}
    anchor_edges: list[UEdge] = []
    for node in g.nodes:
        groups = _anchored_tokens(g, node, tokens, offset)
        nodes.append(UNode(
            ids[node.id], SEMANTIC, node.label, node.properties,
            orig_id=node.id, anchor_groups=groups, extras=node.extras,
        ))
        targets = sorted({i for group in groups for i in group})
        if node.id in floating:
            targets = [0]
        anchor_edges.extend(UEdge(ids[node.id], t, ANCHOR_LABEL) for t in targets)

    edges = [UEdge(ids[e.source], ids[e.target], e.label, e.attributes, e.extras) for e in g.edges]
    return UniformGraph(
        id=g.id,
        framework=g.framework,
        input=g.input,
        tokens=tokens,
        nodes=tuple(nodes),
        edges=tuple(edges + anchor_edges),
        tops=frozenset(ids[t] for t in g.tops),
        flavor=g.flavor,
        virtual_root=virtual,
        extras=g.extras,
    )


def _merge_runs(indices: list[int]) -> list[list[int]]:
    runs: list[list[int]] = []
    for i in indices:
        if runs and runs[-1][-1] + 1 == i:
            runs[-1].append(i)
        else:
            runs.append([i])
    return runs


def deuniformize(u: UniformGraph) -> Graph:
    """Inverse of :func:`uniformize`.

    Anchors are rebuilt from anchor edges. When the node still carries its
    original token grouping it is reused, otherwise runs of consecutive
    tokens are merged into single spans.
    """
    semantic = u.semantic_nodes
    keep_ids = all(n.orig_id is not None for n in semantic)
    new_id = {n.id: (n.orig_id if keep_ids else i) for i, n in enumerate(semantic)}
    token_of = {n.id: n.token_ref for n in u.nodes if n.kind == TOKEN}
    first_real = 1 if u.virtual_root else 0

    anchored: dict[int, list[int]] = {n.id: [] for n in semantic}
    edges = []
    for e in u.edges:
        if e.is_anchor:
            ref = token_of[e.target]
            if ref >= first_real:
                anchored[e.source].append(ref)
        else:
            edges.append(Edge(new_id[e.source], new_id[e.target], e.label, e.attributes, e.extras))

    nodes = []
    for n in semantic:
        refs = sorted(set(anchored[n.id]))
        groups = n.anchor_groups
        if groups is None or sorted({i for g in groups for i in g}) != refs:
            groups = tuple(tuple(run) for run in _merge_runs(refs))
        anchors = tuple((u.tokens[g[0]].start, u.tokens[g[-1]].end) for g in groups)
        nodes.append(Node(new_id[n.id], n.label, n.properties, anchors, n.extras))

    return Graph(
        id=u.id,
        framework=u.framework,
        input=u.input,
        nodes=tuple(nodes),
        edges=tuple(edges),
        tops=frozenset(new_id[t] for t in u.tops),
        flavor=u.flavor,
        extras=u.extras,
    )


# -- JSON-lines wire form -------------------------------------------------

def uniform_to_dict(u: UniformGraph) -> dict:
    out: dict[str, Any] = {"id": u.id, "flavor": u.flavor, "framework": u.framework, "input": u.input}
    out["tokens"] = [{"form": t.form, "start": t.start, "end": t.end} for t in u.tokens]
    if u.virtual_root:
        out["virtual_root"] = True
    if u.tops:
        out["tops"] = sorted(u.tops)
    nodes = []
    for n in u.nodes:
        raw: dict[str, Any] = {"id": n.id, "kind": n.kind}
        if n.kind == TOKEN:
            raw["token"] = n.token_ref
        if n.label is not None:
            raw["label"] = n.label
        if n.properties:
            raw["properties"] = [k for k, _ in n.properties]
            raw["values"] = [v for _, v in n.properties]
        if n.orig_id is not None:
            raw["orig_id"] = n.orig_id
        if n.anchor_groups is not None:
            raw["anchor_groups"] = [list(g) for g in n.anchor_groups]
        if n.extras:
            raw["extras"] = dict(n.extras)
        nodes.append(raw)
    out["nodes"] = nodes
    edges = []
    for e in u.edges:
        raw = {"source": e.source, "target": e.target}
        if e.label is not None:
            raw["label"] = e.label
        if e.attributes:
            raw["attributes"] = [k for k, _ in e.attributes]
            raw["values"] = [v for _, v in e.attributes]
        if e.extras:
            raw["extras"] = dict(e.extras)
        edges.append(raw)
    if edges:
        out["edges"] = edges
    if u.extras:
        out["extras"] = dict(u.extras)
    return out


def _pairs(raw: dict, key: str) -> Pairs:
    return tuple(zip(raw.get(key) or [], raw.get("values") or []))


def uniform_from_dict(obj: dict) -> UniformGraph:
    tokens = tuple(Token(i, t["form"], t["start"], t["end"]) for i, t in enumerate(obj.get("tokens") or []))
    nodes = []
    for raw in obj["nodes"]:
        groups = raw.get("anchor_groups")
        nodes.append(UNode(
            id=raw["id"],
            kind=raw["kind"],
            label=raw.get("label"),
            properties=_pairs(raw, "properties"),
            token_ref=raw.get("token"),
            orig_id=raw.get("orig_id"),
            anchor_groups=None if groups is None else tuple(tuple(g) for g in groups),
            extras=tuple((raw.get("extras") or {}).items()),
        ))
    edges = tuple(
        UEdge(e["source"], e["target"], e.get("label"), _pairs(e, "attributes"), tuple((e.get("extras") or {}).items()))
        for e in obj.get("edges") or []
    )
    return UniformGraph(
        id=obj["id"],
        framework=obj["framework"],
        input=obj["input"],
        tokens=tokens,
        nodes=tuple(nodes),
        edges=edges,
        tops=frozenset(obj.get("tops") or []),
        flavor=obj.get("flavor"),
        virtual_root=bool(obj.get("virtual_root")),
        extras=tuple((obj.get("extras") or {}).items()),
    )


def serialize_uniform(u: UniformGraph) -> str:
    return json.dumps(uniform_to_dict(u), ensure_ascii=False, separators=(",", ":"))


def parse_uniform_line(text: str) -> UniformGraph:
    return uniform_from_dict(json.loads(text))
