"""Graph construction: name resolution, edge binding, topological order."""
import random

import pytest

from scriptflow.graph import GraphCycleError, build_graph
from scriptflow.randomdocs import random_clean_document
from scriptflow.wire import (
    Position,
    ScriptDocument,
    ScriptEdge,
    ScriptNode,
    parse_document_strict,
    serialize,
)


def node(node_id: int, component: str, **pins) -> ScriptNode:
    return ScriptNode(node_id, component, Position(0.0, 0.0), pins)


def doc(nodes, edges=()) -> ScriptDocument:
    return parse_document_strict(
        serialize(ScriptDocument(nodes=tuple(nodes), edges=tuple(edges)))
    )


def test_exact_names_resolve_silently(catalog):
    graph = build_graph(doc([node(1, "Construct Point"), node(2, "Line")]), catalog)
    assert graph.diagnostics == ()
    assert graph.nodes[1].component == "Construct Point"
    assert not graph.nodes[1].placeholder


def test_fuzzy_component_name_emits_info(catalog):
    graph = build_graph(doc([node(1, "Lien")]), catalog)
    assert graph.nodes[1].component == "Line"
    rules = [d.rule for d in graph.diagnostics]
    assert rules == ["fuzzy-component"]
    assert graph.diagnostics[0].severity == "info"


def test_unknown_component_becomes_placeholder(catalog):
    graph = build_graph(doc([node(1, "Quantum Gate")]), catalog)
    assert graph.nodes[1].placeholder
    assert graph.nodes[1].spec is None
    # construction itself stays quiet; the lint layer reports R1
    assert all(d.rule != "R1" for d in graph.diagnostics)


def test_edges_to_placeholders_are_preserved(catalog):
    d = doc(
        [node(1, "Construct Point"), node(2, "Quantum Gate")],
        [ScriptEdge(1, "Pt", 2, "Input")],
    )
    graph = build_graph(d, catalog)
    assert len(graph.edges) == 1
    edge = graph.edges[0]
    assert not edge.to_known


def test_fuzzy_port_resolution(catalog):
    d = doc(
        [node(1, "Construct Point"), node(2, "Construct Point")],
        [ScriptEdge(1, "Pt", 2, "Z ")],
    )
    graph = build_graph(d, catalog)
    edge = graph.edges[0]
    assert edge.to_port == "Z"
    assert edge.to_known


def test_in_edges_sorted_and_filtered(catalog):
    d = doc(
        [node(1, "Construct Point"), node(2, "Construct Point"),
         node(3, "Construct Point"), node(4, "Merge")],
        [ScriptEdge(3, "Pt", 4, "A"),
         ScriptEdge(1, "Pt", 4, "A"),
         ScriptEdge(2, "Pt", 4, "A")],
    )
    graph = build_graph(d, catalog)
    froms = [e.source.from_id for e in graph.in_edges(4, "A")]
    assert froms == [1, 2, 3]
    assert graph.in_edges(4, "Nope") == []


def test_topo_order_is_dependency_respecting_and_id_tied(catalog):
    d = doc(
        [node(7, "Line"), node(3, "Construct Point"), node(5, "Construct Point")],
        [ScriptEdge(3, "Pt", 7, "Start"), ScriptEdge(5, "Pt", 7, "End")],
    )
    graph = build_graph(d, catalog)
    assert graph.order == (3, 5, 7)


def test_topo_order_random_documents(catalog):
    rng = random.Random(11)
    for _ in range(100):
        d = random_clean_document(rng)
        graph = build_graph(d, catalog)
        seen = set()
        position = {nid: i for i, nid in enumerate(graph.order)}
        assert sorted(graph.order) == sorted(graph.nodes)
        for edge in graph.edges:
            assert position[edge.source.from_id] < position[edge.source.to_id]
            seen.add(edge.source.from_id)


def test_cycle_raises_with_member_nodes(catalog):
    d = doc(
        [node(1, "Addition"), node(2, "Addition"), node(3, "Addition")],
        [ScriptEdge(1, "Result", 2, "A"),
         ScriptEdge(2, "Result", 3, "A"),
         ScriptEdge(3, "Result", 1, "A")],
    )
    with pytest.raises(GraphCycleError) as err:
        build_graph(d, catalog)
    assert set(err.value.cycle) == {1, 2, 3}


def test_unknown_pin_names_collected(catalog):
    d = doc([node(1, "Circle", Radius=2.0, Girth=9.0)])
    graph = build_graph(d, catalog)
    assert graph.nodes[1].unknown_pins == ("Girth",)
    assert "Radius" in graph.nodes[1].pins
