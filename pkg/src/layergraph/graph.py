"""MRP graph model with JSON-lines reading, writing and validation.

Anchor offsets are Unicode scalar-value (code point) indices into
``Graph.input``, which is what Python string indexing gives us.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any, Iterable, Iterator, Optional, TextIO

FRAMEWORKS = ("dm", "psd", "eds", "ucca", "amr")
FLAVORS = {"dm": 0, "psd": 0, "eds": 1, "ucca": 1, "amr": 2}

ANCHOR_LABEL = "::anchor"

_GRAPH_KEYS = ("id", "flavor", "framework", "input", "tops", "nodes", "edges")
_NODE_KEYS = ("id", "label", "properties", "values", "anchors")
_EDGE_KEYS = ("source", "target", "label", "attributes", "values")

Pairs = tuple[tuple[str, str], ...]
Extras = tuple[tuple[str, Any], ...]


class MRPFormatError(ValueError):
    """Raised for text that is not a well-formed MRP JSON object."""

    def __init__(self, message: str, offset: Optional[int] = None, line: Optional[int] = None):
        self.reason = message
        self.offset = offset
        self.line = line
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class GraphValidationError(ValueError):
    def __init__(self, graph_id: str, violations: list["Violation"]):
        self.graph_id = graph_id
        self.violations = violations
        shown = "; ".join(str(v) for v in violations[:5])
        super().__init__(f"graph {graph_id!r}: {shown}")


@dataclass(frozen=True)
class Violation:
    code: str
    ids: tuple = ()
    detail: str = ""

    def __str__(self) -> str:
        ids = ",".join(str(i) for i in self.ids)
        text = f"{self.code}{{{ids}}}"
        return f"{text} {self.detail}" if self.detail else text


@dataclass(frozen=True)
class Node:
    id: int
    label: Optional[str] = None
    properties: Pairs = ()
    anchors: tuple[tuple[int, int], ...] = ()
    extras: Extras = ()

    def property(self, name: str) -> Optional[str]:
        for key, value in self.properties:
            if key == name:
                return value
        return None


@dataclass(frozen=True)
class Edge:
    source: int
    target: int
    label: Optional[str] = None
    attributes: Pairs = ()
    extras: Extras = ()

    @property
    def key(self) -> tuple[int, int, Optional[str]]:
        return (self.source, self.target, self.label)


@dataclass(frozen=True)
class Graph:
    id: str
    framework: str
    input: str
    nodes: tuple[Node, ...] = ()
    edges: tuple[Edge, ...] = ()
    tops: frozenset[int] = frozenset()
    flavor: Optional[int] = None
    extras: Extras = ()

    def __post_init__(self) -> None:
        if self.flavor is None and self.framework in FLAVORS:
            object.__setattr__(self, "flavor", FLAVORS[self.framework])

    def node(self, node_id: int) -> Node:
        for node in self.nodes:
            if node.id == node_id:
                return node
        raise KeyError(node_id)

    def is_top(self, node_id: int) -> bool:
        return node_id in self.tops


def validate(g: Graph) -> list[Violation]:
    """Return every invariant violation of ``g``; an empty list means valid."""
    out: list[Violation] = []
    if g.framework not in FLAVORS:
        out.append(Violation("UnknownFramework", (), g.framework))
    elif g.flavor != FLAVORS[g.framework]:
        out.append(Violation("FlavorMismatch", (), f"{g.framework} has flavor {FLAVORS[g.framework]}, got {g.flavor}"))

    seen: set[int] = set()
    for node in g.nodes:
        if node.id in seen:
            out.append(Violation("DuplicateNodeId", (node.id,)))
        seen.add(node.id)
        names = [name for name, _ in node.properties]
        for name in sorted({n for n in names if names.count(n) > 1}):
            out.append(Violation("DuplicateProperty", (node.id,), name))
        for start, end in node.anchors:
            if not 0 <= start < end <= len(g.input):
                out.append(Violation("AnchorOutOfRange", (node.id,), f"[{start},{end})"))

    triples: set[tuple[int, int, Optional[str]]] = set()
    for edge in g.edges:
        if edge.source not in seen or edge.target not in seen:
            missing = tuple(i for i in (edge.source, edge.target) if i not in seen)
            out.append(Violation("DanglingEdge", (edge.source, edge.target), f"unknown node {missing[0]}"))
        if edge.source == edge.target:
            out.append(Violation("SelfLoop", (edge.source,)))
        if edge.key in triples:
            out.append(Violation("DuplicateEdge", (edge.source, edge.target), str(edge.label)))
        triples.add(edge.key)
        if edge.label == ANCHOR_LABEL:
            out.append(Violation("ReservedLabel", (edge.source, edge.target), ANCHOR_LABEL))
        names = [name for name, _ in edge.attributes]
        for name in sorted({n for n in names if names.count(n) > 1}):
            out.append(Violation("DuplicateAttribute", (edge.source, edge.target), name))

    for top in sorted(g.tops):
        if top not in seen:
            out.append(Violation("UnknownTop", (top,)))
    return out


def _string(value: Any) -> str:
    # wire values should already be strings; anything else is kept as its JSON text
    return value if isinstance(value, str) else json.dumps(value, ensure_ascii=False)


def _pairs(obj: dict, names_key: str, where: str) -> Pairs:
    names = obj.get(names_key) or []
    values = obj.get("values") or []
    if len(names) != len(values):
        raise MRPFormatError(f"{where}: {names_key} and values differ in length")
    return tuple((str(n), _string(v)) for n, v in zip(names, values))


def _extras(obj: dict, known: tuple[str, ...]) -> Extras:
    return tuple((k, v) for k, v in obj.items() if k not in known)


def graph_from_dict(obj: dict) -> Graph:
    for key in ("id", "framework", "input", "nodes"):
        if key not in obj:
            raise MRPFormatError(f"missing required field {key!r}")
    gid = str(obj["id"])
    nodes = []
    for raw in obj["nodes"]:
        if not isinstance(raw, dict) or "id" not in raw:
            raise MRPFormatError(f"graph {gid!r}: node without id")
        anchors = tuple((int(a["from"]), int(a["to"])) for a in raw.get("anchors") or [])
        nodes.append(Node(
            id=int(raw["id"]),
            label=raw.get("label"),
            properties=_pairs(raw, "properties", f"graph {gid!r} node {raw['id']}"),
            anchors=anchors,
            extras=_extras(raw, _NODE_KEYS),
        ))
    edges = []
    for raw in obj.get("edges") or []:
        edges.append(Edge(
            source=int(raw["source"]),
            target=int(raw["target"]),
            label=raw.get("label"),
            attributes=_pairs(raw, "attributes", f"graph {gid!r} edge"),
            extras=_extras(raw, _EDGE_KEYS),
        ))
    return Graph(
        id=gid,
        framework=str(obj["framework"]),
        input=str(obj["input"]),
        nodes=tuple(nodes),
        edges=tuple(edges),
        tops=frozenset(int(t) for t in obj.get("tops") or []),
        flavor=obj.get("flavor"),
        extras=_extras(obj, _GRAPH_KEYS),
    )


def parse_mrp_line(json_text: str, check: bool = True) -> Graph:
    """Parse one MRP JSON object into a :class:`Graph`.

    With ``check`` (the default) the graph is validated and a
    :class:`GraphValidationError` is raised on any violation.
    """
    try:
        obj = json.loads(json_text)
    except json.JSONDecodeError as exc:
        offset = len(json_text[: exc.pos].encode("utf-8"))
        raise MRPFormatError(f"malformed JSON: {exc.msg}", offset) from None
    if not isinstance(obj, dict):
        raise MRPFormatError("expected a JSON object", 0)
    try:
        g = graph_from_dict(obj)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, MRPFormatError):
            raise
        raise MRPFormatError(f"bad field: {exc}") from None
    if check:
        violations = validate(g)
        if violations:
            raise GraphValidationError(g.id, violations)
    return g


def _emit_pairs(out: dict, names_key: str, pairs: Pairs) -> None:
    if pairs:
        out[names_key] = [name for name, _ in pairs]
        out["values"] = [value for _, value in pairs]


def graph_to_dict(g: Graph) -> dict:
    out: dict[str, Any] = {"id": g.id}
    if g.flavor is not None:
        out["flavor"] = g.flavor
    out["framework"] = g.framework
    extras = dict(g.extras)
    for key in ("version", "time"):
        if key in extras:
            out[key] = extras.pop(key)
    out["input"] = g.input
    if g.tops:
        out["tops"] = sorted(g.tops)
    nodes = []
    for node in g.nodes:
        raw: dict[str, Any] = {"id": node.id}
        if node.label is not None:
            raw["label"] = node.label
        _emit_pairs(raw, "properties", node.properties)
        if node.anchors:
            raw["anchors"] = [{"from": a, "to": b} for a, b in node.anchors]
        raw.update(node.extras)
        nodes.append(raw)
    out["nodes"] = nodes
    if g.edges:
        edges = []
        for edge in g.edges:
            raw = {"source": edge.source, "target": edge.target}
            if edge.label is not None:
                raw["label"] = edge.label
            _emit_pairs(raw, "attributes", edge.attributes)
            raw.update(edge.extras)
            edges.append(raw)
        out["edges"] = edges
    out.update(extras)
    return out


def serialize_mrp(g: Graph) -> str:
    """One JSON line, fixed key order, empty optional fields omitted."""
    return json.dumps(graph_to_dict(g), ensure_ascii=False, separators=(",", ":"))


def read_mrp(stream: TextIO | Iterable[str], check: bool = True) -> Iterator[Graph]:
    for lineno, line in enumerate(stream, 1):
        if not line.strip():
            continue
        try:
            yield parse_mrp_line(line, check=check)
        except MRPFormatError as exc:
            raise MRPFormatError(exc.reason, exc.offset, lineno) from None


def write_mrp(graphs: Iterable[Graph], stream: TextIO) -> None:
    for g in graphs:
        stream.write(serialize_mrp(g))
        stream.write("\n")


def load_mrp(path, check: bool = True) -> list[Graph]:
    with open(path, encoding="utf-8") as handle:
        return list(read_mrp(handle, check=check))
