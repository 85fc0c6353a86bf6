import random
from dataclasses import replace

import pytest

from generators import random_graph
from layergraph.eval import COMPONENTS, InputMismatch, align_nodes, score, score_corpus
from layergraph.graph import Edge, Graph, Node


def two_edge_graph():
    nodes = (Node(0, "a", (), ((0, 3),)), Node(1, "b", (("pos", "NN"),), ((4, 7),)), Node(2, "c", (), ((8, 11),)))
    edges = (Edge(0, 1, "ARG1"), Edge(0, 2, "ARG2", (("remote", "true"),)))
    return Graph("g", "dm", "abc def ghi", nodes, edges, frozenset({0}))


def test_identical_graphs_align_totally_and_score_perfectly():
    g = two_edge_graph()
    assert align_nodes(g, g) == {0: 0, 1: 1, 2: 2}
    s = score(g, g)
    for c in COMPONENTS:
        assert s.f1(c) == 1.0


def test_self_scoring_is_perfect_on_random_graphs():
    rng = random.Random(3)
    for i in range(100):
        g = random_graph(rng, f"r{i}")
        s = score(g, g)
        assert all(s.f1(c) == 1.0 for c in s.applicable())


def test_different_anchors_stay_unmatched():
    gold = Graph("g", "dm", "abcde", (Node(0, "x", (), ((0, 5),)),), (), frozenset())
    pred = Graph("g", "dm", "abcde", (Node(0, "x", (), ((0, 3),)),), (), frozenset())
    assert align_nodes(pred, gold) == {}
    assert score(pred, gold).f1("labels") == 0.0


def test_label_preferring_alignment():
    gold = Graph("g", "eds", "ab", (Node(0, "udef_q", (), ((0, 2),)), Node(1, "_dog_n_1", (), ((0, 2),))), (), frozenset())
    pred = Graph("g", "eds", "ab", (Node(5, "_dog_n_1", (), ((0, 2),)), Node(6, "udef_q", (), ((0, 2),))), (), frozenset())
    assert align_nodes(pred, gold) == {5: 1, 6: 0}
    assert score(pred, gold).f1("labels") == 1.0


def test_whitespace_inside_anchor_is_ignored():
    gold = Graph("g", "dm", "ab cd", (Node(0, "x", (), ((0, 5),)),), (), frozenset())
    pred = Graph("g", "dm", "ab cd", (Node(0, "x", (), ((0, 2), (3, 5))),), (), frozenset())
    assert align_nodes(pred, gold) == {0: 0}
    assert score(pred, gold).f1("anchors") == 1.0


def test_empty_prediction_scores_zero():
    gold = two_edge_graph()
    pred = Graph("g", "dm", gold.input, (), (), frozenset())
    s = score(pred, gold)
    for c in COMPONENTS:
        assert s.f1(c) == 0.0


def test_partial_edges_formula():
    gold = two_edge_graph()
    pred = replace(gold, edges=gold.edges[:1])
    counts = score(pred, gold).counts["edges"]
    assert (counts.gold, counts.predicted, counts.matched) == (2, 1, 1)
    assert counts.precision == 1.0
    assert counts.recall == 0.5
    assert counts.f1 == pytest.approx(2 / 3)


def test_removing_a_correct_edge_never_raises_edge_f1():
    rng = random.Random(11)
    for i in range(100):
        gold = random_graph(rng, f"m{i}", extra_edges=6)
        pred = gold
        last = score(pred, gold).f1("edges")
        while pred.edges:
            pred = replace(pred, edges=pred.edges[:-1])
            now = score(pred, gold).f1("edges")
            assert now is None or last is None or now <= last
            last = now


def test_edge_label_perturbation_leaves_other_components_alone():
    rng = random.Random(5)
    for i in range(100):
        gold = random_graph(rng, f"p{i}")
        pred = replace(gold, edges=tuple(replace(e, label=f"X{j}") for j, e in enumerate(gold.edges)))
        a, b = score(gold, gold), score(pred, gold)
        for c in ("tops", "labels", "properties", "anchors"):
            assert a.counts[c] == b.counts[c]


def test_input_mismatch():
    g = two_edge_graph()
    with pytest.raises(InputMismatch):
        score(replace(g, input="abc def ghj"), g)


def test_absent_components_and_macro_average():
    dm = two_edge_graph()
    ucca = Graph("u", "ucca", "ab", (Node(0, None, (), ()), Node(1, None, (), ((0, 2),))), (Edge(0, 1, "C"),),
                 frozenset({0}))
    empty_dm = Graph("g", "dm", dm.input, (), (), frozenset())
    report = score_corpus([(empty_dm, dm), (ucca, ucca)])
    assert report.graphs == {"dm": 1, "ucca": 1}
    assert report.per_framework["ucca"].f1("labels") is None
    assert report.per_framework["ucca"].f1("properties") is None
    # labels only exist for dm, so the macro average is dm's alone
    assert report.macro("labels") == (0.0, 0.0, 0.0)
    assert report.macro("edges") == pytest.approx((0.5, 0.5, 0.5))
