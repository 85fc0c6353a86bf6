"""Training, parsing and the on-disk model bundle.

Bundle layout: a first line ``LAYERGRAPH-BUNDLE <version>`` followed by
one JSON document (sorted keys) holding the config, the rule inventories
and the count tables of every classifier.
"""

from __future__ import annotations

import json
import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Optional, Sequence

from ..config import Config
from ..encoding import RuleInventory, build_inventory
from ..graph import Graph
from ..oracle import AUTO_LIMIT, NOTHING, IsolatedComponent, coverage, extract_script
from ..tokenizer import Tokenizer
from ..uniform import TOKEN, AnchorMismatch, UniformGraph, deuniformize, uniformize, with_virtual_root
from .classifier import BackoffClassifier
from .decoder import FAMILIES, GoldDecoder, decode, make_training_examples
from .features import Analysis, align_companion

log = logging.getLogger(__name__)

MAGIC = "LAYERGRAPH-BUNDLE"
FORMAT_VERSION = 1
LEVELS = 3


class BundleError(ValueError):
    pass


class VersionMismatch(BundleError):
    pass


class CorruptBundle(BundleError):
    pass


@dataclass(eq=True)
class IterationModel:
    decision: BackoffClassifier
    label: BackoffClassifier
    properties: dict[str, BackoffClassifier]
    edge: BackoffClassifier
    edge_label: BackoffClassifier
    attributes: dict[str, BackoffClassifier]

    def to_dict(self) -> dict:
        return {
            "decision": self.decision.to_dict(),
            "label": self.label.to_dict(),
            "properties": {k: v.to_dict() for k, v in sorted(self.properties.items())},
            "edge": self.edge.to_dict(),
            "edge_label": self.edge_label.to_dict(),
            "attributes": {k: v.to_dict() for k, v in sorted(self.attributes.items())},
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "IterationModel":
        load = BackoffClassifier.from_dict
        return cls(
            load(obj["decision"]), load(obj["label"]),
            {k: load(v) for k, v in obj["properties"].items()},
            load(obj["edge"]), load(obj["edge_label"]),
            {k: load(v) for k, v in obj["attributes"].items()},
        )


@dataclass(eq=True)
class ModelBundle:
    config: Config
    inventories: dict[str, RuleInventory]
    iterations: list[IterationModel]
    top: BackoffClassifier
    property_names: tuple[str, ...] = ()
    attribute_names: tuple[str, ...] = ()
    version: int = FORMAT_VERSION
    summary: dict = field(default_factory=dict, compare=False)

    def iteration_model(self, iteration: int) -> IterationModel:
        return self.iterations[min(iteration, len(self.iterations)) - 1]

    def to_dict(self) -> dict:
        return {
            "version": self.version,
            "config": self.config.to_dict(),
            "inventories": {k: v.to_dict() for k, v in sorted(self.inventories.items())},
            "iterations": [m.to_dict() for m in self.iterations],
            "top": self.top.to_dict(),
            "property_names": list(self.property_names),
            "attribute_names": list(self.attribute_names),
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "ModelBundle":
        return cls(
            config=Config.from_dict(obj["config"]),
            inventories={k: RuleInventory.from_dict(v) for k, v in obj["inventories"].items()},
            iterations=[IterationModel.from_dict(m) for m in obj["iterations"]],
            top=BackoffClassifier.from_dict(obj["top"]),
            property_names=tuple(obj["property_names"]),
            attribute_names=tuple(obj["attribute_names"]),
            version=obj["version"],
        )


def save_bundle(bundle: ModelBundle) -> bytes:
    body = json.dumps(bundle.to_dict(), ensure_ascii=False, sort_keys=True, separators=(",", ":"))
    return f"{MAGIC} {bundle.version}\n{body}\n".encode("utf-8")


def load_bundle(data: bytes) -> ModelBundle:
    header, sep, body = data.partition(b"\n")
    parts = header.split()
    if not sep or len(parts) != 2 or parts[0] != MAGIC.encode():
        raise CorruptBundle("missing bundle header")
    try:
        version = int(parts[1])
    except ValueError:
        raise CorruptBundle("unreadable bundle version") from None
    if version != FORMAT_VERSION:
        raise VersionMismatch(f"bundle format {version}, this build reads {FORMAT_VERSION}")
    try:
        obj = json.loads(body.decode("utf-8"))
        if obj.get("version") != version:
            raise CorruptBundle("header and body versions differ")
        return ModelBundle.from_dict(obj)
    except CorruptBundle:
        raise
    except (ValueError, KeyError, TypeError, AttributeError) as exc:
        raise CorruptBundle(f"unreadable bundle body: {exc}") from None


# -- classifier-backed decoder -------------------------------------------

class BundleDecoder:
    def __init__(self, bundle: ModelBundle):
        self.bundle = bundle

    def decide(self, iteration, state, node):
        model = self.bundle.iteration_model(iteration)
        return model.decision.predict(state.node_chain(node, iteration), NOTHING)

    def node_classes(self, iteration, state, origin, direction, new):
        model = self.bundle.iteration_model(iteration)
        chain = [f"{direction}:{key}" for key in state.node_chain(origin, iteration)]
        label = model.label.ranking(chain)
        properties = {name: clf.ranking(chain) for name, clf in model.properties.items()}
        return label, properties

    def edge(self, iteration, state, source, target):
        model = self.bundle.iteration_model(iteration)
        return model.edge.scores(state.pair_chain(source, target, iteration)).get("1", 0.0) >= 0.5

    def edge_classes(self, iteration, state, source, target):
        model = self.bundle.iteration_model(iteration)
        chain = state.pair_chain(source, target, iteration)
        return model.edge_label.ranking(chain), {n: c.ranking(chain) for n, c in model.attributes.items()}

    def top(self, state, node):
        return self.bundle.top.scores(state.node_chain(node, 0)).get("1", 0.0)


# -- training -------------------------------------------------------------

@dataclass
class Prepared:
    graph: Graph
    uniform: UniformGraph
    analyses: list[Analysis]


def prepare(graphs: Iterable[Graph], config: Config, companion: Optional[Mapping[str, Sequence[Analysis]]] = None):
    """Tokenize and uniformize graphs; returns (prepared, skipped)."""
    tokenizer = Tokenizer(config.tokenizer_mode, config.rule2b_word_run)
    prepared, skipped = [], []
    for g in graphs:
        tokens = tokenizer.tokenize(g.input)
        try:
            u = uniformize(g, tokens, config.allow_unanchored)
        except AnchorMismatch as exc:
            skipped.append((g.id, str(exc)))
            continue
        analyses = align_companion(u.tokens, (companion or {}).get(g.id))
        prepared.append(Prepared(g, u, analyses))
    return prepared, skipped


def _node_token_forms(u: UniformGraph, node_id: int, gen_token: int) -> list[str]:
    first = 1 if u.virtual_root else 0
    nodes = u.node_map()
    anchored = sorted(
        e.target for e in u.edges
        if e.source == node_id and e.is_anchor and nodes[e.target].kind == TOKEN and e.target >= first
    )
    if not anchored:
        anchored = [gen_token]
    return [u.tokens[i].form for i in anchored]


def _generating_tokens(script) -> dict[int, int]:
    """Gold node id -> index of the token its creation chain started from."""
    gen = {i: i for i in range(len(script.tokens))}
    new = len(script.tokens)
    for it in script.iterations:
        for op in it.add_nodes:
            gen[new] = gen[op.origin]
            new += 1
    return {script.gold_ids[cid]: token for cid, token in gen.items()}


def _extract_all(prepared: list[Prepared], limit: int, skipped: list) -> list[tuple[Prepared, Any, bool]]:
    scripts = []
    for item in prepared:
        try:
            script, covered = extract_script(item.uniform, limit)
        except IsolatedComponent as exc:
            skipped.append((item.graph.id, str(exc)))
            continue
        scripts.append((item, script, covered))
    return scripts


def _inventories(scripts) -> tuple[dict[str, RuleInventory], tuple[str, ...], tuple[str, ...]]:
    """Rule inventories for the node label and every property name."""
    pairs: dict[str, list] = defaultdict(list)
    attribute_names: set[str] = set()
    for item, script, _ in scripts:
        gen = _generating_tokens(script)
        for node in item.uniform.semantic_nodes:
            if node.id not in gen:
                continue
            forms = _node_token_forms(item.uniform, node.id, gen[node.id])
            if node.label is not None:
                pairs["label"].append((forms, node.label))
            for name, value in node.properties:
                pairs[name].append((forms, value))
        for e in item.uniform.edges:
            attribute_names.update(name for name, _ in e.attributes)
    inventories = {name: build_inventory(items, name) for name, items in sorted(pairs.items())}
    property_names = tuple(sorted(n for n in pairs if n != "label"))
    return inventories, property_names, tuple(sorted(attribute_names))


def analyze_encodings(corpus: Iterable[Graph], config: Config) -> dict[str, RuleInventory]:
    """The label/property rule inventories training would build for ``corpus``."""
    prepared, skipped = prepare(corpus, config)
    return _inventories(_extract_all(prepared, AUTO_LIMIT, skipped))[0]


def train(corpus: Iterable[Graph], config: Config, companion: Optional[Mapping[str, Sequence[Analysis]]] = None) -> ModelBundle:
    """Fit every decoder classifier on ``corpus`` by counting."""
    prepared, skipped = prepare(corpus, config, companion)
    budget = config.iterations
    extract_limit = AUTO_LIMIT if budget == "auto" else max(budget, 1)
    scripts = _extract_all(prepared, extract_limit, skipped)
    inventories, property_names, attribute_names_t = _inventories(scripts)

    if budget == "auto":
        n_iterations = max((len(s.iterations) for _, s, _ in scripts), default=0) + 1
    else:
        n_iterations = budget

    examples: dict[tuple, list] = defaultdict(list)
    for item, script, _ in scripts:
        got = make_training_examples(script, item.uniform, inventories, n_iterations, item.analyses,
                                     property_names, attribute_names_t)
        for key, rows in got.items():
            examples[key].extend(rows)

    def fit(key) -> BackoffClassifier:
        return BackoffClassifier(LEVELS).train(examples.get(key, []))

    iterations = [
        IterationModel(
            decision=fit(("decision", i)),
            label=fit(("label", i)),
            properties={name: fit(("property", i, name)) for name in property_names},
            edge=fit(("edge", i)),
            edge_label=fit(("edge_label", i)),
            attributes={name: fit(("attribute", i, name)) for name in attribute_names_t},
        )
        for i in range(1, n_iterations + 1)
    ]
    bundle = ModelBundle(config, inventories, iterations, fit(("top",)), property_names, attribute_names_t)

    counts = Counter()
    classes: dict[str, set] = defaultdict(set)
    for key, rows in examples.items():
        counts[key[0]] += len(rows)
        classes[key[0]].update(cls for _, cls in rows)
    report = coverage([item.uniform for item, _, _ in scripts], max(n_iterations, 1))
    bundle.summary = {
        "graphs": len(scripts),
        "skipped": skipped,
        "iterations": n_iterations,
        "examples": {family: counts.get(family, 0) for family in FAMILIES},
        "classes": {family: len(classes.get(family, ())) for family in FAMILIES},
        "inventories": {name: [inv.mode, inv.absolute_count, inv.relative_count] for name, inv in inventories.items()},
        "coverage": {
            "nodes": report.node_coverage[n_iterations - 1] if n_iterations else 0.0,
            "graphs": report.graph_coverage[n_iterations - 1] if n_iterations else 0.0,
        },
    }
    for graph_id, reason in skipped:
        log.warning("skipped %s: %s", graph_id, reason)
    return bundle


def gold_parse(corpus: Iterable[Graph], config: Config) -> list[tuple[Graph, Graph, bool]]:
    """Decode every graph with answers read off its own operation script.

    Returns (gold, predicted, covered) triples, where ``covered`` says the
    script completed the graph within ``config.iterations``. Graphs the
    oracle cannot handle are left out.
    """
    prepared, skipped = prepare(corpus, config)
    limit = AUTO_LIMIT if config.iterations == "auto" else max(config.iterations, 1)
    scripts = _extract_all(prepared, limit, skipped)
    inventories, property_names, attribute_names = _inventories(scripts)
    out = []
    for item, script, covered in scripts:
        decoder = GoldDecoder(script, item.uniform, inventories, property_names, attribute_names)
        u = decode(script.tokens, decoder, len(script.iterations), inventories, item.analyses,
                   script.virtual_root, auto_limit=limit)
        u = UniformGraph(item.graph.id, config.framework, item.graph.input, u.tokens, u.nodes, u.edges, u.tops,
                         virtual_root=u.virtual_root)
        out.append((item.graph, deuniformize(u), covered))
    return out


# -- parsing --------------------------------------------------------------

def parse(sentence: str, bundle: ModelBundle, graph_id: str = "0", analyses: Optional[Sequence[Analysis]] = None,
          decoder=None, iterations: Optional[int | str] = None) -> Graph:
    """Parse ``sentence`` into an MRP graph with the bundle's classifiers."""
    config = bundle.config
    tokens = Tokenizer(config.tokenizer_mode, config.rule2b_word_run).tokenize(sentence)
    if config.allow_unanchored:
        tokens = list(with_virtual_root(tokens))
    budget = config.iterations if iterations is None else iterations
    aligned = align_companion(tokens, analyses)
    u = decode(
        tokens, decoder or BundleDecoder(bundle),
        None if budget == "auto" else budget,
        bundle.inventories, aligned, config.allow_unanchored, config.force_top, AUTO_LIMIT,
    )
    u = UniformGraph(graph_id, config.framework, sentence, u.tokens, u.nodes, u.edges, u.tops,
                     virtual_root=u.virtual_root)
    return deuniformize(u)
