"""The layer-wise decoding loop and the decoders that drive it.

:func:`decode` runs AddNodes/AddEdges iterations against any object with
the :class:`Decoder` methods. The same loop produces training examples:
:class:`GoldDecoder` answers every question from an operation script and a
:class:`Recorder` stores each (features, answer) pair.
"""

from __future__ import annotations

import json
from collections import defaultdict
from typing import Iterable, Optional, Protocol, Sequence

from ..encoding import NONE, EncodingError, RuleInventory
from ..graph import ANCHOR_LABEL
from ..oracle import CHILD, NOTHING, PARENT, OperationScript
from ..uniform import SEMANTIC, TOKEN, UEdge, UNode, UniformGraph
from .features import State

# decoder families, each with its own classifiers
FAMILIES = ("decision", "label", "property", "edge", "edge_label", "attribute", "top")


class ScriptMismatch(ValueError):
    pass


class Decoder(Protocol):
    def decide(self, iteration: int, state: State, node: int) -> str: ...

    def node_classes(self, iteration: int, state: State, origin: int, direction: str,
                     new: int) -> tuple[list[str], dict[str, list[str]]]: ...

    def edge(self, iteration: int, state: State, source: int, target: int) -> bool: ...

    def edge_classes(self, iteration: int, state: State, source: int,
                     target: int) -> tuple[list[str], dict[str, list[str]]]: ...

    def top(self, state: State, node: int) -> float: ...


def labels_class(labels: Sequence[Optional[str]]) -> str:
    return json.dumps(sorted(labels, key=lambda l: (l is not None, l or "")), ensure_ascii=False)


def attribute_class(values: Sequence[Optional[str]]) -> str:
    if all(v is None for v in values):
        return NONE
    return json.dumps(list(values), ensure_ascii=False)


def _materialize(state: State, node: int, inventories: dict[str, RuleInventory],
                 label_ranking: list[str], property_rankings: dict[str, list[str]]):
    tokens = state.node_tokens(node)

    def first_applicable(inventory: Optional[RuleInventory], ranking: list[str]):
        for cls in ranking:
            if cls == NONE:
                return None
            if inventory is None:
                continue
            try:
                return inventory.decode(tokens, cls)
            except EncodingError:
                continue
        return None

    label = first_applicable(inventories.get("label"), label_ranking)
    properties = []
    for name in sorted(property_rankings):
        value = first_applicable(inventories.get(name), property_rankings[name])
        if value is not None:
            properties.append((name, value))
    return label, tuple(properties)


def decode(tokens, decoder: Decoder, iterations: Optional[int], inventories: dict[str, RuleInventory],
           analyses=None, virtual_root: bool = False, force_top: bool = False,
           auto_limit: int = 50) -> UniformGraph:
    """Build a uniform graph from ``tokens`` with ``decoder``'s answers.

    ``iterations=None`` keeps going until AddNodes creates nothing (at most
    ``auto_limit`` iterations).
    """
    state = State.initial(tokens, analyses, virtual_root)
    labels: dict[int, tuple[Optional[str], tuple]] = {}
    limit = auto_limit if iterations is None else iterations
    for iteration in range(1, limit + 1):
        frozen = list(range(len(state)))
        plans = []
        for node in frozen:
            decision = decoder.decide(iteration, state, node)
            if decision == CHILD and state.kinds[node] == TOKEN:
                decision = PARENT
            if decision in (PARENT, CHILD):
                plans.append((node, decision))
        if not plans:
            break

        rankings = {}
        implied = []
        new_nodes = []
        for origin, direction in plans:
            new = len(state)
            label_ranking, property_rankings = decoder.node_classes(iteration, state, origin, direction, new)
            label_class = label_ranking[0] if label_ranking else NONE
            props = {name: r[0] for name, r in property_rankings.items() if r and r[0] != NONE}
            state.add_node(origin, iteration, label_class, props)
            rankings[new] = (label_ranking, property_rankings)
            implied.append((new, origin) if direction == PARENT else (origin, new))
            new_nodes.append(new)

        accepted = []
        implied_set = set(implied)
        fresh = set(new_nodes)
        for a in new_nodes:
            for b in range(len(state)):
                if b == a:
                    continue
                pairs = [(a, b)] if b in fresh else [(a, b), (b, a)]
                for source, target in pairs:
                    keep = decoder.edge(iteration, state, source, target)
                    if (keep or (source, target) in implied_set) and state.kinds[source] != TOKEN:
                        accepted.append((source, target))
        for source, target in accepted:
            label_ranking, attribute_rankings = decoder.edge_classes(iteration, state, source, target)
            for label, attributes in _edge_labels(state, source, target, label_ranking, attribute_rankings):
                state.add_edge(source, target, label, attributes)

        for new in new_nodes:
            labels[new] = _materialize(state, new, inventories, *rankings[new])

    semantic = [n for n in range(len(state)) if state.kinds[n] == SEMANTIC]
    scores = {n: decoder.top(state, n) for n in semantic}
    tops = {n for n, score in scores.items() if score >= 0.5}
    if force_top and semantic and not tops:
        tops = {max(semantic, key=lambda n: (scores[n], -n))}
    return _to_uniform(state, labels, tops)


def _edge_labels(state: State, source: int, target: int, label_ranking: list[str],
                 attribute_rankings: dict[str, list[str]]):
    if state.kinds[target] == TOKEN:
        return [(ANCHOR_LABEL, ())]
    labels: list[Optional[str]] = [None]
    for cls in label_ranking:
        try:
            candidate = json.loads(cls)
        except ValueError:
            continue
        candidate = [l for l in candidate if l != ANCHOR_LABEL]
        if candidate:
            labels = candidate
            break
    out = []
    for i, label in enumerate(dict.fromkeys(labels)):
        attributes = []
        for name in sorted(attribute_rankings):
            ranking = attribute_rankings[name]
            if not ranking or ranking[0] == NONE:
                continue
            try:
                values = json.loads(ranking[0])
            except ValueError:
                continue
            if i < len(values) and values[i] is not None:
                attributes.append((name, str(values[i])))
        out.append((label, tuple(attributes)))
    return out


def _to_uniform(state: State, labels, tops) -> UniformGraph:
    nodes = []
    for n in range(len(state)):
        if state.kinds[n] == TOKEN:
            nodes.append(UNode(n, TOKEN, token_ref=n))
        else:
            label, properties = labels.get(n, (None, ()))
            nodes.append(UNode(n, SEMANTIC, label, properties))
    edges = [
        UEdge(s, t, label, attributes)
        for (s, t), entries in sorted(state.edges.items())
        for label, attributes in entries
    ]
    return UniformGraph("", "", "", state.tokens, tuple(nodes), tuple(edges), frozenset(tops),
                        virtual_root=state.virtual_root)


# -- gold answers ---------------------------------------------------------

class GoldDecoder:
    """Reads every decision from an operation script and its gold graph."""

    def __init__(self, script: OperationScript, gold: UniformGraph, inventories: dict[str, RuleInventory],
                 property_names: Iterable[str] = (), attribute_names: Iterable[str] = ()):
        self.script = script
        self.inventories = inventories
        self.property_names = sorted(property_names)
        self.attribute_names = sorted(attribute_names)
        self.gold_nodes = gold.node_map()
        if len(script.gold_ids) != script.node_count:
            raise ScriptMismatch(f"graph {script.graph_id!r}: script does not map its nodes to gold ids")
        self.to_gold = list(script.gold_ids)
        gold_edges: dict[tuple[int, int], list[UEdge]] = defaultdict(list)
        for e in gold.edges:
            gold_edges[(e.source, e.target)].append(e)
        self.gold_edges = gold_edges
        self.ops = []
        base = len(script.tokens)
        for it in script.iterations:
            by_origin = {}
            for op in it.add_nodes:
                by_origin[op.origin] = (op, base)
                base += 1
            self.ops.append(by_origin)
        self._check(gold)

    def _check(self, gold: UniformGraph) -> None:
        for index, it in enumerate(self.script.iterations):
            for op in it.add_nodes:
                _, new = self.ops[index][op.origin]
                node = self.gold_nodes.get(self.to_gold[new])
                if node is None or node.label != op.label or node.properties != op.properties:
                    raise ScriptMismatch(f"graph {self.script.graph_id!r}: AddNodes op does not match gold node")
                pair = (new, op.origin) if op.direction == PARENT else (op.origin, new)
                if (self.to_gold[pair[0]], self.to_gold[pair[1]]) not in self.gold_edges:
                    raise ScriptMismatch(f"graph {self.script.graph_id!r}: AddNodes edge missing from gold")
            for e in it.add_edges:
                if not any(g.label == e.label for g in self.gold_edges.get((self.to_gold[e.source], self.to_gold[e.target]), [])):
                    raise ScriptMismatch(f"graph {self.script.graph_id!r}: edge {e.source}->{e.target} not in gold")

    def decide(self, iteration, state, node):
        if iteration > len(self.ops):
            return NOTHING
        entry = self.ops[iteration - 1].get(node)
        return entry[0].direction if entry else NOTHING

    def node_classes(self, iteration, state, origin, direction, new):
        op, _ = self.ops[iteration - 1][origin]
        tokens = self._gold_tokens(state, origin, new)
        label = self.inventories["label"].encode(tokens, op.label) if "label" in self.inventories else NONE
        props = dict(op.properties)
        properties = {}
        for name in self.property_names:
            inventory = self.inventories.get(name)
            value = props.get(name)
            properties[name] = [inventory.encode(tokens, value) if inventory and value is not None else NONE]
        return [label], properties

    def _gold_tokens(self, state: State, origin: int, new: int) -> list[str]:
        # token nodes keep their ids in scripts, and all anchors of a node
        # arrive in its creation iteration
        first = 1 if state.virtual_root else 0
        anchored = sorted(
            e.target
            for (s, _), entries in self.gold_edges.items() if s == self.to_gold[new]
            for e in entries
            if e.label == ANCHOR_LABEL and self.gold_nodes[e.target].kind == TOKEN and e.target >= first
        )
        if not anchored:
            anchored = [state.gen_token[origin]]
        return [state.tokens[i].form for i in anchored]

    def _pair_edges(self, source: int, target: int) -> list[UEdge]:
        if source >= len(self.to_gold) or target >= len(self.to_gold):
            return []
        return self.gold_edges.get((self.to_gold[source], self.to_gold[target]), [])

    def edge(self, iteration, state, source, target):
        return bool(self._pair_edges(source, target))

    def edge_classes(self, iteration, state, source, target):
        edges = sorted(self._pair_edges(source, target), key=lambda e: (e.label is not None, e.label or ""))
        label = labels_class([e.label for e in edges])
        attributes = {
            name: [attribute_class([dict(e.attributes).get(name) for e in edges])]
            for name in self.attribute_names
        }
        return [label], attributes

    def top(self, state, node):
        return 1.0 if node in self.script.tops else 0.0


class Recorder:
    """Wraps a decoder and stores each (backoff chain, answer) it gives."""

    def __init__(self, inner):
        self.inner = inner
        self.examples: dict[tuple, list] = defaultdict(list)

    def decide(self, iteration, state, node):
        answer = self.inner.decide(iteration, state, node)
        self.examples[("decision", iteration)].append((state.node_chain(node, iteration), answer))
        return answer

    def node_classes(self, iteration, state, origin, direction, new):
        label, properties = self.inner.node_classes(iteration, state, origin, direction, new)
        chain = [f"{direction}:{key}" for key in state.node_chain(origin, iteration)]
        self.examples[("label", iteration)].append((chain, label[0]))
        for name, ranking in properties.items():
            self.examples[("property", iteration, name)].append((chain, ranking[0]))
        return label, properties

    def edge(self, iteration, state, source, target):
        answer = self.inner.edge(iteration, state, source, target)
        self.examples[("edge", iteration)].append((state.pair_chain(source, target, iteration), "1" if answer else "0"))
        return answer

    def edge_classes(self, iteration, state, source, target):
        label, attributes = self.inner.edge_classes(iteration, state, source, target)
        chain = state.pair_chain(source, target, iteration)
        self.examples[("edge_label", iteration)].append((chain, label[0]))
        for name, ranking in attributes.items():
            self.examples[("attribute", iteration, name)].append((chain, ranking[0]))
        return label, attributes

    def top(self, state, node):
        answer = self.inner.top(state, node)
        self.examples[("top",)].append((state.node_chain(node, 0), "1" if answer >= 0.5 else "0"))
        return answer


def make_training_examples(script: OperationScript, gold: UniformGraph, inventories: dict[str, RuleInventory],
                           iterations: Optional[int] = None, analyses=None,
                           property_names: Iterable[str] = (), attribute_names: Iterable[str] = ()) -> dict[tuple, list]:
    """Decoder training examples, keyed by (family, iteration[, name]).

    Decision examples cover every existing node in every iteration; label
    and property examples exist only for created nodes; edge examples cover
    every candidate pair; label/attribute examples only accepted pairs.
    """
    if iterations is None:
        iterations = len(script.iterations)
    recorder = Recorder(GoldDecoder(script, gold, inventories, property_names, attribute_names))
    decode(script.tokens, recorder, iterations, inventories, analyses, script.virtual_root,
           auto_limit=iterations)
    return dict(recorder.examples)
