"""Document serialization: strict parsing, tolerant repair, canonical bytes."""
import json
import random

import pytest

from scriptflow.randomdocs import random_wire_document
from scriptflow.wire import (
    ParseError,
    Position,
    ScriptDocument,
    ScriptEdge,
    ScriptNode,
    SliderPin,
    parse_document_strict,
    parse_document_tolerant,
    serialize,
)


def doc_one_node(**pins) -> ScriptDocument:
    node = ScriptNode(1, "Construct Point", Position(10.0, 20.0), pins)
    return ScriptDocument(nodes=(node,))


def test_empty_document_bytes():
    assert serialize(ScriptDocument()) == '{"schema_version":1,"nodes":[],"edges":[]}'


def test_round_trip_identity():
    doc = doc_one_node(X=1.5, Y=2)
    assert parse_document_strict(serialize(doc)) == doc


def test_serialize_orders_nodes_and_edges():
    nodes = (
        ScriptNode(5, "Line", Position(0.0, 0.0), {}),
        ScriptNode(2, "Construct Point", Position(0.0, 0.0), {}),
        ScriptNode(9, "Construct Point", Position(0.0, 0.0), {}),
    )
    edges = (
        ScriptEdge(9, "Pt", 5, "End"),
        ScriptEdge(2, "Pt", 5, "Start"),
    )
    text = serialize(ScriptDocument(nodes=nodes, edges=edges))
    data = json.loads(text)
    assert [n["id"] for n in data["nodes"]] == [2, 5, 9]
    assert [(e["to"]["id"], e["to"]["port"]) for e in data["edges"]] == [
        (5, "End"), (5, "Start"),
    ]


def test_slider_pin_round_trip():
    node = ScriptNode(1, "Number Slider", Position(0.0, 0.0),
                      {"N": SliderPin(0.0, 10.0, 4.0)})
    doc = ScriptDocument(nodes=(node,))
    back = parse_document_strict(serialize(doc))
    pin = back.nodes[0].pins["N"]
    assert isinstance(pin, SliderPin)
    assert (pin.min, pin.max, pin.value) == (0.0, 10.0, 4.0)


def test_prompt_metadata_round_trip():
    doc = ScriptDocument().with_prompt("a truss")
    back = parse_document_strict(serialize(doc))
    assert back.prompt == "a truss"


@pytest.mark.parametrize("mutate,path_fragment", [
    (lambda d: d.pop("schema_version"), "schema_version"),
    (lambda d: d.__setitem__("schema_version", 2), "schema_version"),
    (lambda d: d.__setitem__("extra", 1), "extra"),
    (lambda d: d["nodes"][0].pop("position"), "nodes[0]"),
    (lambda d: d["nodes"][0].pop("component"), "nodes[0]"),
    (lambda d: d["nodes"][0].__setitem__("id", "one"), "nodes[0]"),
    (lambda d: d["edges"].append(
        {"from": {"id": 1, "port": "Pt"}, "to": {"id": 99, "port": "X"}}),
     "edges[0].to.id"),
])
def test_strict_rejections_carry_paths(mutate, path_fragment):
    base = json.loads(serialize(doc_one_node(X=1.0)))
    mutate(base)
    with pytest.raises(ParseError) as err:
        parse_document_strict(json.dumps(base))
    assert path_fragment in str(err.value)


def test_strict_rejects_duplicate_node_ids():
    text = ('{"schema_version":1,"nodes":['
            '{"id":1,"component":"Line","position":{"x":0,"y":0}},'
            '{"id":1,"component":"Loft","position":{"x":0,"y":0}}],"edges":[]}')
    with pytest.raises(ParseError, match="duplicate"):
        parse_document_strict(text)


def test_strict_rejects_duplicate_json_keys():
    text = ('{"schema_version":1,"nodes":[],"edges":[],'
            '"nodes":[{"id":1,"component":"Line","position":{"x":0,"y":0}}]}')
    with pytest.raises(ParseError, match="duplicate"):
        parse_document_strict(text)


def test_strict_rejects_nan():
    text = ('{"schema_version":1,"nodes":[{"id":1,"component":"Line",'
            '"position":{"x":NaN,"y":0}}],"edges":[]}')
    with pytest.raises(ParseError):
        parse_document_strict(text)


def test_strict_rejects_self_loop():
    text = ('{"schema_version":1,"nodes":[{"id":1,"component":"Line",'
            '"position":{"x":0,"y":0}}],"edges":['
            '{"from":{"id":1,"port":"L"},"to":{"id":1,"port":"Start"}}]}')
    with pytest.raises(ParseError, match="itself"):
        parse_document_strict(text)


def test_tolerant_accepts_everything_strict_accepts():
    rng = random.Random(4242)
    for _ in range(100):
        text = serialize(random_wire_document(rng))
        doc, notes = parse_document_tolerant(text)
        assert notes == []
        assert doc == parse_document_strict(text)


def test_tolerant_strips_code_fence():
    text = "```json\n" + serialize(doc_one_node()) + "\n```"
    doc, notes = parse_document_tolerant(text)
    assert len(doc.nodes) == 1
    assert [n.rule for n in notes] == ["tolerant-fence"]


def test_tolerant_removes_trailing_comma():
    text = ('{"schema_version":1,"nodes":[{"id":1,"component":"Line",'
            '"position":{"x":0,"y":0},}],"edges":[]}')
    doc, notes = parse_document_tolerant(text)
    assert len(doc.nodes) == 1
    assert any(n.rule == "tolerant-comma" for n in notes)


def test_tolerant_coerces_string_numbers():
    text = ('{"schema_version":1,"nodes":[{"id":"3","component":"Line",'
            '"position":{"x":"1.5","y":0}}],"edges":[]}')
    doc, notes = parse_document_tolerant(text)
    assert doc.nodes[0].id == 3
    assert doc.nodes[0].position.x == 1.5
    assert all(n.rule == "tolerant-number" for n in notes)
    assert len(notes) == 2


def test_tolerant_drops_unknown_keys():
    text = ('{"schema_version":1,"nodes":[{"id":1,"component":"Line",'
            '"position":{"x":0,"y":0},"color":"red"}],"edges":[],"zoom":2}')
    doc, notes = parse_document_tolerant(text)
    assert len(doc.nodes) == 1
    assert sorted(n.rule for n in notes) == ["tolerant-key", "tolerant-key"]


def test_tolerant_auto_layout_missing_positions():
    text = ('{"schema_version":1,"nodes":['
            '{"id":1,"component":"Construct Point"},'
            '{"id":2,"component":"Construct Point"},'
            '{"id":3,"component":"Line"}],"edges":['
            '{"from":{"id":1,"port":"Pt"},"to":{"id":3,"port":"Start"}},'
            '{"from":{"id":2,"port":"Pt"},"to":{"id":3,"port":"End"}}]}')
    doc, notes = parse_document_tolerant(text)
    assert sum(1 for n in notes if n.rule == "tolerant-position") == 3
    by_id = {n.id: n for n in doc.nodes}
    # depth 0 sources stack in rows; the sink sits one column right
    assert (by_id[1].position.x, by_id[1].position.y) == (0.0, 0.0)
    assert (by_id[2].position.x, by_id[2].position.y) == (0.0, 120.0)
    assert (by_id[3].position.x, by_id[3].position.y) == (220.0, 0.0)


def test_tolerant_still_rejects_hopeless_input():
    with pytest.raises(ParseError):
        parse_document_tolerant("this is not a document")
    with pytest.raises(ParseError):
        parse_document_tolerant('{"nodes": 7}')


def test_fuzz_round_trip_stability():
    rng = random.Random(1234)
    for _ in range(300):
        doc = random_wire_document(rng)
        text = serialize(doc)
        again = serialize(parse_document_strict(text))
        assert again == text


def test_node_ids_sorted_after_parse():
    rng = random.Random(77)
    for _ in range(50):
        doc = parse_document_strict(serialize(random_wire_document(rng)))
        ids = [n.id for n in doc.nodes]
        assert ids == sorted(ids)
