"""Regenerate fixtures.mrp and memo.mrp from the hand-written specs below.

Anchors are written as token indices (an int, or an inclusive (first, last)
range) and turned into character spans with the package tokenizer, so the
fixtures always line up with token boundaries.

    python3 tests/data/make_fixtures.py
"""

from __future__ import annotations

from pathlib import Path

from layergraph.graph import Edge, Graph, Node, serialize_mrp, validate
from layergraph.tokenizer import tokenize

HERE = Path(__file__).parent


def build(gid, framework, text, nodes, edges, tops):
    tokens = tokenize(text, "ucca" if framework == "ucca" else "default")
    built = []
    for i, (label, props, anchors) in enumerate(nodes):
        spans = []
        for a in anchors:
            first, last = (a, a) if isinstance(a, int) else a
            spans.append((tokens[first].start, tokens[last].end))
        built.append(Node(i, label, tuple(props.items()), tuple(spans)))
    built_edges = []
    for e in edges:
        source, target, label = e[:3]
        attributes = tuple(e[3].items()) if len(e) > 3 else ()
        built_edges.append(Edge(source, target, label, attributes))
    g = Graph(gid, framework, text, tuple(built), tuple(built_edges), frozenset(tops))
    problems = validate(g)
    assert not problems, (gid, problems)
    return g


def dm(pos, frame=None):
    return {"pos": pos, **({"frame": frame} if frame else {})}


DM = [
    ("dm-01", "The cat sat on the mat.",
     [("the", dm("DT", "q"), [0]), ("cat", dm("NN", "n:x"), [1]), ("sit", dm("VBD", "v:e-i"), [2]),
      ("on", dm("IN", "p:e-u-i"), [3]), ("the", dm("DT", "q"), [4]), ("mat", dm("NN", "n:x"), [5])],
     [(0, 1, "BV"), (2, 1, "ARG1"), (3, 2, "ARG1"), (3, 5, "ARG2"), (4, 5, "BV")], [2]),
    ("dm-02", "Pierre Vinken will join the board.",
     [("Pierre", dm("NNP", "named:x-c"), [0]), ("Vinken", dm("NNP", "named:x-c"), [1]),
      ("join", dm("VB", "v:e-i-p"), [3]), ("the", dm("DT", "q"), [4]), ("board", dm("NN", "n:x"), [5])],
     [(1, 0, "compound"), (2, 1, "ARG1"), (2, 4, "ARG2"), (3, 4, "BV")], [2]),
    ("dm-03", "Dogs don't like cold baths.",
     [("dog", dm("NNS", "n:x"), [0]), ("not", dm("RB", "neg:e-h"), [2]), ("like", dm("VB", "v:e-i-p"), [3]),
      ("cold", dm("JJ", "a:e-p"), [4]), ("bath", dm("NNS", "n:x"), [5])],
     [(1, 2, "neg"), (2, 0, "ARG1"), (2, 4, "ARG2"), (3, 4, "ARG1")], [1]),
    ("dm-04", "She looked at 1,000 stars.",
     [("she", dm("PRP", "n:x"), [0]), ("look", dm("VBD", "v:e-i-p"), [1]), ("1,000", dm("CD", "card:i-i-c"), [3]),
      ("star", dm("NNS", "n:x"), [4])],
     [(1, 0, "ARG1"), (1, 3, "ARG2"), (2, 3, "ARG1")], [1]),
    ("dm-05", "John and Mary went home.",
     [("John", dm("NNP", "named:x-c"), [0]), ("and", dm("CC", "c:i-i-i"), [1]), ("Mary", dm("NNP", "named:x-c"), [2]),
      ("go", dm("VBD", "v:e-i"), [3]), ("home", dm("NN", "n:x"), [4])],
     [(1, 0, "_and_c"), (1, 2, "_and_c"), (3, 1, "ARG1"), (3, 4, "ARG2")], [3]),
    ("dm-06", "The children ate the apples quickly.",
     [("the", dm("DT", "q"), [0]), ("child", dm("NNS", "n:x"), [1]), ("eat", dm("VBD", "v:e-i-p"), [2]),
      ("the", dm("DT", "q"), [3]), ("apple", dm("NNS", "n:x"), [4]), ("quick", dm("RB", "a:e-e"), [5])],
     [(0, 1, "BV"), (2, 1, "ARG1"), (2, 4, "ARG2"), (3, 4, "BV"), (5, 2, "ARG1")], [2]),
    ("dm-07", "I'll buy the red car.",
     [("I", dm("PRP", "n:x"), [0]), ("buy", dm("VB", "v:e-i-p"), [2]), ("the", dm("DT", "q"), [3]),
      ("red", dm("JJ", "a:e-p"), [4]), ("car", dm("NN", "n:x"), [5])],
     [(1, 0, "ARG1"), (1, 4, "ARG2"), (2, 4, "BV"), (3, 4, "ARG1")], [1]),
    ("dm-08", "Mary gave John a book.",
     [("Mary", dm("NNP", "named:x-c"), [0]), ("give", dm("VBD", "v:e-i-p-i"), [1]), ("John", dm("NNP", "named:x-c"), [2]),
      ("a", dm("DT", "q"), [3]), ("book", dm("NN", "n:x"), [4])],
     [(1, 0, "ARG1"), (1, 4, "ARG2"), (1, 2, "ARG3"), (3, 4, "BV")], [1]),
    ("dm-09", "Prices rose sharply in May.",
     [("price", dm("NNS", "n:x"), [0]), ("rise", dm("VBD", "v:e-i"), [1]), ("sharp", dm("RB", "a:e-e"), [2]),
      ("in", dm("IN", "p:e-u-i"), [3]), ("May", dm("NNP", "mofy:x-c"), [4])],
     [(1, 0, "ARG1"), (2, 1, "ARG1"), (3, 1, "ARG1"), (3, 4, "ARG2")], [1]),
    ("dm-10", "The old man can't see well.",
     [("the", dm("DT", "q"), [0]), ("old", dm("JJ", "a:e-p"), [1]), ("man", dm("NN", "n:x"), [2]),
      ("can", dm("MD", "v:e-h"), [3]), ("not", dm("RB", "neg:e-h"), [4]), ("see", dm("VB", "v:e-i"), [5]),
      ("well", dm("RB", "a:e-e"), [6])],
     [(0, 2, "BV"), (1, 2, "ARG1"), (3, 5, "ARG1"), (4, 3, "neg"), (5, 2, "ARG1"), (6, 5, "ARG1")], [4]),
]

PSD = [
    ("psd-01", "The cat sat on the mat.",
     [("cat", dm("NN"), [1]), ("sit", dm("VBD", "ev-w2888f1"), [2]), ("mat", dm("NN"), [5])],
     [(1, 0, "ACT-arg"), (1, 2, "LOC")], [1]),
    ("psd-02", "Investors don't expect a recovery.",
     [("investor", dm("NNS"), [0]), ("#Neg", dm("RB"), [2]), ("expect", dm("VB", "ev-w1215f1"), [3]),
      ("recovery", dm("NN"), [5])],
     [(2, 0, "ACT-arg"), (2, 1, "RHEM"), (2, 3, "PAT-arg")], [2]),
    ("psd-03", "John and Mary went home.",
     [("John", dm("NNP"), [0]), ("and", dm("CC"), [1]), ("Mary", dm("NNP"), [2]),
      ("go", dm("VBD", "ev-w1474f1"), [3]), ("home", dm("NN"), [4])],
     [(1, 0, "CONJ.member"), (1, 2, "CONJ.member"), (3, 0, "ACT-arg"), (3, 2, "ACT-arg"), (3, 4, "DIR3")], [3]),
]

EDS = [
    ("eds-01", "The cat sat.",
     [("_the_q", {}, [(0, 1)]), ("_cat_n_1", {}, [1]), ("_sit_v_1", {}, [2])],
     [(0, 1, "BV"), (2, 1, "ARG1")], [2]),
    ("eds-02", "Pierre Vinken will join.",
     [("proper_q", {}, [(0, 1)]), ("named", {"carg": "Vinken"}, [1]), ("compound", {}, [(0, 1)]),
      ("named", {"carg": "Pierre"}, [0]), ("_join_v_1", {}, [3])],
     [(0, 1, "BV"), (2, 1, "ARG1"), (2, 3, "ARG2"), (4, 1, "ARG1")], [4]),
    ("eds-03", "Dogs bark.",
     [("udef_q", {}, [0]), ("_dog_n_1", {}, [0]), ("_bark_v_1", {}, [1])],
     [(0, 1, "BV"), (2, 1, "ARG1")], [2]),
    ("eds-04", "The man who left smiled.",
     [("_the_q", {}, [(0, 1)]), ("_man_n_1", {}, [1]), ("_leave_v_1", {}, [3]), ("_smile_v_1", {}, [4])],
     [(0, 1, "BV"), (2, 1, "ARG1"), (3, 1, "ARG1")], [3]),
]

UCCA = [
    ("ucca-01", "John ate apples.",
     [(None, {}, []), (None, {}, [0]), (None, {}, [1]), (None, {}, [2]), (None, {}, [3])],
     [(0, 1, "A"), (0, 2, "P"), (0, 3, "A"), (0, 4, "U")], [0]),
    ("ucca-02", "The old man left.",
     [(None, {}, []), (None, {}, []), (None, {}, [0]), (None, {}, [1]), (None, {}, [2]), (None, {}, [3]),
      (None, {}, [4])],
     [(0, 1, "A"), (0, 5, "P"), (0, 6, "U"), (1, 2, "E"), (1, 3, "E"), (1, 4, "C")], [0]),
    ("ucca-03", "New York is big.",
     [(None, {}, []), (None, {}, [(0, 1)]), (None, {}, [2]), (None, {}, [3]), (None, {}, [4])],
     [(0, 1, "A"), (0, 2, "F"), (0, 3, "S"), (0, 4, "U")], [0]),
    ("ucca-04", "John wants to leave.",
     [(None, {}, []), (None, {}, [0]), (None, {}, [1]), (None, {}, []), (None, {}, [2]), (None, {}, [3]),
      (None, {}, [4])],
     [(0, 1, "A"), (0, 2, "P"), (0, 3, "A"), (0, 6, "U"), (3, 4, "F"), (3, 5, "P"),
      (3, 1, "A", {"remote": "true"})], [0]),
]

AMR = [
    ("amr-01", "The boy wants to go.",
     [("want-01", {}, [2]), ("boy", {}, [1]), ("go-02", {}, [4])],
     [(0, 1, "ARG0"), (0, 2, "ARG1"), (2, 1, "ARG0")], [0]),
    # deliberately cyclic: man -> leave -> man
    ("amr-02", "The man who left smiled.",
     [("smile-01", {}, [4]), ("man", {}, [1]), ("leave-11", {}, [3])],
     [(0, 1, "ARG0"), (1, 2, "ARG0-of"), (2, 1, "ARG0")], [0]),
    ("amr-03", "Pierre Vinken will join.",
     [("join-01", {}, [3]), ("person", {}, []), ("name", {"op1": "Pierre", "op2": "Vinken"}, [(0, 1)])],
     [(0, 1, "ARG0"), (1, 2, "name")], [0]),
    ("amr-04", "Dogs don't bark.",
     [("bark-01", {"polarity": "-"}, [3]), ("dog", {}, [0])],
     [(0, 1, "ARG0")], [0]),
]


def graphs():
    for framework, specs in (("dm", DM), ("psd", PSD), ("eds", EDS), ("ucca", UCCA), ("amr", AMR)):
        for gid, text, nodes, edges, tops in specs:
            yield build(gid, framework, text, nodes, edges, tops)


def main():
    all_graphs = list(graphs())
    (HERE / "fixtures.mrp").write_text("".join(serialize_mrp(g) + "\n" for g in all_graphs), encoding="utf-8")
    memo = [g for g in all_graphs if g.framework == "dm"]
    (HERE / "memo.mrp").write_text("".join(serialize_mrp(g) + "\n" for g in memo), encoding="utf-8")
    print(f"{len(all_graphs)} fixture graphs, {len(memo)} in the memorization set")


if __name__ == "__main__":
    main()
