import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from generators import random_graph
from layergraph.graph import (
    Edge, Graph, GraphValidationError, MRPFormatError, Node, graph_from_dict, parse_mrp_line, read_mrp,
    serialize_mrp, validate, write_mrp,
)


def codes(g):
    return [v.code for v in validate(g)]


def test_minimal_object():
    g = parse_mrp_line('{"id":"g0","framework":"dm","input":"a","nodes":[{"id":0}]}')
    assert len(g.nodes) == 1 and g.edges == () and g.tops == frozenset()
    assert g.flavor == 0


def test_parallel_arrays_become_pairs():
    g = parse_mrp_line(json.dumps({
        "id": "1", "framework": "dm", "input": "Pierre",
        "nodes": [{"id": 0, "label": "Pierre", "properties": ["pos"], "values": ["NNP"], "anchors": [{"from": 0, "to": 6}]}],
    }))
    assert g.nodes[0].properties == (("pos", "NNP"),)
    assert g.nodes[0].property("pos") == "NNP"
    assert g.nodes[0].anchors == ((0, 6),)


def test_unlabeled_node_serialization_omits_empty_fields():
    text = serialize_mrp(Graph("x", "dm", "a", (Node(0),)))
    assert text == '{"id":"x","flavor":0,"framework":"dm","input":"a","nodes":[{"id":0}]}'
    assert "edges" not in json.loads(text)


def test_tops_serialized_sorted():
    g = Graph("t", "eds", "a b c d", tuple(Node(i) for i in range(5)), tops=frozenset({3, 1}))
    assert json.loads(serialize_mrp(g))["tops"] == [1, 3]


def test_unknown_fields_preserved():
    line = ('{"id":"u","flavor":2,"framework":"amr","version":1.0,"time":"2019-06-23","input":"hi",'
            '"nodes":[{"id":0,"label":"hi","extra":[1,2]}],"edges":[{"source":0,"target":1,"label":"x","normal":"y"}],'
            '"provenance":"me"}')
    g = parse_mrp_line(line, check=False)
    assert serialize_mrp(g) == line


def test_numeric_property_values_kept_as_text():
    g = parse_mrp_line('{"id":"n","framework":"amr","input":"5","nodes":[{"id":0,"properties":["quant"],"values":[5]}]}')
    assert g.nodes[0].properties == (("quant", "5"),)


def test_malformed_json_has_byte_offset():
    with pytest.raises(MRPFormatError) as info:
        parse_mrp_line('{"id": "ü", oops}')
    assert info.value.offset == len('{"id": "ü", '.encode("utf-8"))


def test_read_mrp_keeps_offset_and_line():
    lines = ['{"id":"a","framework":"dm","input":"a","nodes":[]}\n', "\n", "{bad\n"]
    with pytest.raises(MRPFormatError) as info:
        list(read_mrp(lines))
    assert info.value.line == 3 and info.value.offset == 1


def test_missing_required_field():
    with pytest.raises(MRPFormatError):
        parse_mrp_line('{"id":"a","framework":"dm","nodes":[]}')


def test_mismatched_parallel_arrays():
    with pytest.raises(MRPFormatError):
        graph_from_dict({"id": "a", "framework": "dm", "input": "a",
                         "nodes": [{"id": 0, "properties": ["a", "b"], "values": ["x"]}]})


@pytest.mark.parametrize("edges, expected", [
    ([Edge(2, 2)], ["SelfLoop"]),
    ([Edge(0, 1, "ARG1"), Edge(0, 1, "ARG1")], ["DuplicateEdge"]),
    ([Edge(0, 7)], ["DanglingEdge"]),
    ([Edge(0, 1, "::anchor")], ["ReservedLabel"]),
    ([Edge(0, 1, "a", (("x", "1"), ("x", "2")))], ["DuplicateAttribute"]),
    ([Edge(0, 1, "a"), Edge(1, 2, "b"), Edge(2, 0, "c")], []),
    ([Edge(0, 1, "a"), Edge(0, 1, "b")], []),
])
def test_validation_codes(edges, expected):
    g = Graph("v", "dm", "a b c", tuple(Node(i) for i in range(3)), tuple(edges))
    assert codes(g) == expected


def test_node_level_violations():
    g = Graph("v", "dm", "abc", (Node(0, anchors=((0, 4),)), Node(0, properties=(("p", "1"), ("p", "2")))),
              tops=frozenset({9}))
    assert sorted(codes(g)) == ["AnchorOutOfRange", "DuplicateNodeId", "DuplicateProperty", "UnknownTop"]
    assert codes(Graph("v", "xyz", "")) == ["UnknownFramework"]
    assert codes(Graph("v", "dm", "", flavor=1)) == ["FlavorMismatch"]


def test_validation_error_names_graph_and_element():
    with pytest.raises(GraphValidationError) as info:
        parse_mrp_line('{"id":"bad","framework":"dm","input":"a","nodes":[{"id":0}],"edges":[{"source":0,"target":0}]}')
    assert info.value.graph_id == "bad"
    assert info.value.violations[0].code == "SelfLoop" and info.value.violations[0].ids == (0,)
    assert "bad" in str(info.value)


def test_roundtrip_random_graphs():
    rng = random.Random(7)
    for i in range(300):
        g = random_graph(rng, f"r{i}")
        assert validate(g) == []
        text = serialize_mrp(g)
        again = parse_mrp_line(text)
        assert again == g
        assert serialize_mrp(again) == text


def test_write_read_stream(tmp_path, fixture_graphs):
    path = tmp_path / "out.mrp"
    with open(path, "w", encoding="utf-8") as handle:
        write_mrp(fixture_graphs, handle)
    with open(path, encoding="utf-8") as handle:
        assert list(read_mrp(handle)) == fixture_graphs


@settings(max_examples=60, deadline=None)
@given(st.text(max_size=20), st.lists(st.text(max_size=6), max_size=3))
def test_arbitrary_strings_roundtrip(text, labels):
    nodes = tuple(Node(i, label, (("p", label),)) for i, label in enumerate(labels))
    g = Graph(text or "id", "amr", text, nodes)
    assert parse_mrp_line(serialize_mrp(g)) == g
