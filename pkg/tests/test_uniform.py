import random

import pytest

from generators import random_graph
from layergraph.config import Config
from layergraph.graph import ANCHOR_LABEL, Edge, Graph, Node, validate
from layergraph.tokenizer import tokenize
from layergraph.uniform import (
    SEMANTIC, TOKEN, AnchorMismatch, UniformGraph, deuniformize, parse_uniform_line, serialize_uniform,
    uniformize,
)


def toks(g):
    return tokenize(g.input, Config.for_framework(g.framework).tokenizer_mode)


def test_single_token():
    g = Graph("c", "dm", "cat", (Node(0, "cat", anchors=((0, 3),)),))
    u = uniformize(g, toks(g))
    assert len(u.nodes) == 2 and len(u.edges) == 1
    assert u.edges[0].is_anchor and (u.edges[0].source, u.edges[0].target) == (1, 0)
    assert u.nodes[0].kind == TOKEN and u.nodes[0].token_ref == 0 and u.nodes[0].label is None


def test_multi_token_anchor():
    g = Graph("pv", "eds", "Pierre Vinken", (Node(0, "named", anchors=((0, 13),)),))
    u = uniformize(g, toks(g))
    assert sorted((e.source, e.target) for e in u.edges if e.is_anchor) == [(2, 0), (2, 1)]


@pytest.mark.parametrize("span", [(1, 3), (0, 5), (3, 4)])
def test_anchor_mismatch(span):
    g = Graph("m", "dm", "cat dog", (Node(0, anchors=(span,)),))
    with pytest.raises(AnchorMismatch) as info:
        uniformize(g, toks(g))
    assert info.value.node == 0 and info.value.span == span


def test_roundtrip_fixtures(fixture_graphs):
    for g in fixture_graphs:
        u = uniformize(g, toks(g))
        assert deuniformize(u) == g
        assert parse_uniform_line(serialize_uniform(u)) == u


def test_roundtrip_random():
    rng = random.Random(3)
    for i in range(300):
        g = random_graph(rng, f"r{i}")
        u = uniformize(g, toks(g))
        assert deuniformize(u) == g
        anchored = sum(len({t.index for a, b in n.anchors for t in u.tokens if a <= t.start and t.end <= b})
                       for n in g.nodes)
        assert len(u.edges) == len(g.edges) + anchored
        kinds = u.node_map()
        for e in u.edges:
            if e.is_anchor:
                assert kinds[e.source].kind == SEMANTIC and kinds[e.target].kind == TOKEN and not e.attributes
            else:
                assert kinds[e.source].kind == SEMANTIC and kinds[e.target].kind == SEMANTIC


def test_token_nodes_first_in_order(fixture_graphs):
    u = uniformize(fixture_graphs[0], toks(fixture_graphs[0]))
    n = len(u.tokens)
    assert [x.token_ref for x in u.nodes[:n]] == list(range(n))
    assert all(x.kind == SEMANTIC for x in u.nodes[n:])


def test_zero_semantic_nodes():
    g = Graph("e", "dm", "a b")
    u = uniformize(g, toks(g))
    assert len(u.nodes) == 2
    assert deuniformize(u) == g


def test_tops_survive():
    g = Graph("t", "dm", "a b", (Node(5, anchors=((0, 1),)), Node(2, anchors=((2, 3),))), (Edge(5, 2, "x"),),
              frozenset({2}))
    back = deuniformize(uniformize(g, toks(g)))
    assert back.tops == frozenset({2}) and back == g


def test_deuniformize_without_layout_hint_merges_runs():
    g = Graph("h", "eds", "a b c", (Node(0, anchors=((0, 3), (4, 5))),))
    u = uniformize(g, toks(g))
    stripped = UniformGraph(u.id, u.framework, u.input, u.tokens,
                            tuple(n.__class__(n.id, n.kind, n.label, n.properties, n.token_ref) for n in u.nodes),
                            u.edges, u.tops)
    back = deuniformize(stripped)
    assert back.nodes[0].anchors == ((0, 5),)
    assert back.nodes[0].id == 0


def test_virtual_root_for_unanchored_components():
    g = Graph("v", "amr", "run fast", (
        Node(0, "run-01", anchors=((0, 3),)), Node(1, "person"),
        Node(2, "floating"), Node(3, "other"),
    ), (Edge(0, 1, "ARG0"), Edge(2, 3, "mod")))
    u = uniformize(g, toks(g), allow_unanchored=True)
    assert u.virtual_root and u.tokens[0].form == "" and u.tokens[1].form == "run"
    to_root = sorted(e.source for e in u.edges if e.is_anchor and e.target == 0)
    ids = {n.orig_id: n.id for n in u.semantic_nodes}
    assert to_root == [ids[2], ids[3]]
    assert deuniformize(u) == g


def test_anchor_label_constant():
    assert ANCHOR_LABEL == "::anchor"
    assert validate(Graph("x", "dm", "a b", (Node(0), Node(1)), (Edge(0, 1, ANCHOR_LABEL),)))
