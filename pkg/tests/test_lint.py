"""Rule engine behavior, repair suggestions and mechanical application."""
import json
import random

import pytest

from scriptflow.diagnostics import count_errors
from scriptflow.lint import (
    apply_repairs,
    render_diagnostics_json,
    select_compatible,
    validate,
)
from scriptflow.randomdocs import inject_type_mismatch, random_clean_document
from scriptflow.wire import (
    Position,
    ScriptDocument,
    ScriptEdge,
    ScriptNode,
    SliderPin,
    parse_document_strict,
    serialize,
)


def node(node_id: int, component: str, **pins) -> ScriptNode:
    return ScriptNode(node_id, component, Position(0.0, 0.0), pins)


def doc(nodes, edges=()) -> ScriptDocument:
    return parse_document_strict(
        serialize(ScriptDocument(nodes=tuple(nodes), edges=tuple(edges)))
    )


def rules_by_node(diags):
    out = {}
    for d in diags:
        out.setdefault(d.rule, []).append(d.node)
    return out


# a small well-formed scene: slider -> circle -> extrude
def healthy_doc():
    return doc(
        [
            node(1, "Number Slider", N=SliderPin(0.5, 5.0, 2.0)),
            node(2, "Circle"),
            node(3, "Unit Z", Factor=3.0),
            node(4, "Extrude Linear"),
        ],
        [
            ScriptEdge(1, "N", 2, "Radius"),
            ScriptEdge(2, "C", 4, "Profile"),
            ScriptEdge(3, "V", 4, "Axis"),
        ],
    )


def test_healthy_document_is_quiet(catalog):
    assert validate(healthy_doc(), catalog) == []


def test_r1_unknown_component(catalog):
    diags = validate(doc([node(1, "Frobnicator"), node(2, "Circle", Radius=1.0)]), catalog)
    r1 = [d for d in diags if d.rule == "R1"]
    assert len(r1) == 1
    assert r1[0].severity == "error"
    assert r1[0].node == 1


def test_r1_near_miss_suggests_rename(catalog):
    diags = validate(doc([node(1, "Circl", Radius=1.0)]), catalog)
    # distance 1 resolves fuzzily instead; push distance past fuzzy range
    assert not any(d.rule == "R1" for d in diags)
    # distance 3: too far to auto-resolve, close enough to suggest
    diags = validate(doc([node(1, "Circlonk", Radius=1.0)]), catalog)
    r1 = [d for d in diags if d.rule == "R1"]
    assert len(r1) == 1
    repair = r1[0].repair
    assert repair is not None and repair.kind == "rename_component"
    assert repair.component == "Circle"


def test_r2_unknown_edge_port(catalog):
    d = doc(
        [node(1, "Construct Point"), node(2, "Move")],
        [ScriptEdge(1, "Pt", 2, "Thing")],
    )
    diags = validate(d, catalog)
    r2 = [d for d in diags if d.rule == "R2"]
    assert len(r2) == 1
    assert r2[0].severity == "error"
    assert r2[0].node == 2
    assert r2[0].port == "Thing"


def test_r2_skipped_on_placeholder_nodes(catalog):
    d = doc(
        [node(1, "Construct Point"), node(2, "Warp Drive")],
        [ScriptEdge(1, "Pt", 2, "Anything")],
    )
    diags = validate(d, catalog)
    assert any(d.rule == "R1" for d in diags)
    assert not any(d.rule == "R2" for d in diags)


def test_r3_type_mismatch_edge(catalog):
    d = doc(
        [node(1, "Number Slider", N=SliderPin(0.0, 9.0, 1.0)), node(2, "Move"),
         node(3, "Construct Point")],
        [ScriptEdge(1, "N", 2, "Motion"), ScriptEdge(3, "Pt", 2, "Geometry")],
    )
    diags = validate(d, catalog)
    r3 = [d for d in diags if d.rule == "R3"]
    assert len(r3) == 1
    assert r3[0].node == 2 and r3[0].port == "Motion"
    assert r3[0].repair is not None and r3[0].repair.kind == "delete_edge"


def test_r3_skipped_for_universal_sinks(catalog):
    d = doc(
        [node(1, "Number Slider", N=SliderPin(0.0, 9.0, 1.0)),
         node(2, "Construct Point"), node(3, "Merge"), node(4, "List Item", Index=0)],
        [ScriptEdge(1, "N", 3, "A"), ScriptEdge(2, "Pt", 3, "B"),
         ScriptEdge(3, "Result", 4, "List")],
    )
    diags = validate(d, catalog)
    assert not any(d.rule == "R3" for d in diags)


def test_r4_missing_required(catalog):
    d = doc([node(1, "Move")])
    diags = validate(d, catalog)
    r4_ports = sorted(d.port for d in diags if d.rule == "R4")
    assert r4_ports == ["Geometry", "Motion"]
    assert all(d.severity == "error" for d in diags if d.rule == "R4")


def test_r4_insert_default_only_when_catalog_has_one(catalog):
    diags = validate(doc([node(1, "Circle")]), catalog)
    r4 = [d for d in diags if d.rule == "R4"]
    assert len(r4) == 1
    assert r4[0].repair is not None
    assert r4[0].repair.kind == "insert_default"
    assert r4[0].repair.value == 1.0

    diags = validate(doc([node(1, "Move")]), catalog)
    assert all(d.repair is None for d in diags if d.rule == "R4")


def test_r4_not_raised_when_pin_present(catalog):
    diags = validate(doc([node(1, "Circle", Radius=2.0)]), catalog)
    assert not any(d.rule == "R4" for d in diags)


def test_r5_lost_node(catalog):
    # a Series whose output feeds nothing is lost; sliders feeding it are not
    d = doc(
        [node(1, "Number Slider", N=SliderPin(1.0, 9.0, 2.0)),
         node(2, "Series", Start=0.0, Count=4),
         node(3, "Circle", Radius=1.0)],
        [ScriptEdge(1, "N", 2, "Step")],
    )
    diags = validate(d, catalog)
    by_rule = rules_by_node(diags)
    assert by_rule.get("R6") == [1]
    assert "R5" not in by_rule


def test_r5_lost_node_inside_drawing_component(catalog):
    # same island now contains a drawable sink, so the starved-group
    # warning disappears and the dangling Series is reported on its own
    d = doc(
        [node(1, "Number Slider", N=SliderPin(1.0, 9.0, 2.0)),
         node(2, "Series", Start=0.0, Count=4),
         node(3, "Construct Point"), node(4, "Circle", Radius=1.0)],
        [ScriptEdge(1, "N", 2, "Step"), ScriptEdge(1, "N", 3, "X"),
         ScriptEdge(3, "Pt", 4, "Center")],
    )
    diags = validate(d, catalog)
    by_rule = rules_by_node(diags)
    assert by_rule.get("R5") == [2]
    assert "R6" not in by_rule


def test_panel_is_a_legitimate_sink(catalog):
    d = doc(
        [node(1, "Number Slider", N=SliderPin(1.0, 9.0, 2.0)), node(2, "Panel")],
        [ScriptEdge(1, "N", 2, "Content")],
    )
    diags = validate(d, catalog)
    assert diags == []


def test_r6_sink_starved_group(catalog):
    d = doc(
        [node(5, "Number Slider", N=SliderPin(0.0, 9.0, 1.0)),
         node(6, "Addition", B=1.0),
         node(9, "Circle", Radius=1.0)],
        [ScriptEdge(5, "N", 6, "A")],
    )
    diags = validate(d, catalog)
    r6 = [d for d in diags if d.rule == "R6"]
    assert len(r6) == 1
    assert r6[0].severity == "warning"
    assert r6[0].node == 5
    assert "2 node" in r6[0].message


def test_r7_multi_edge_scalar_port(catalog):
    d = doc(
        [node(1, "Number Slider", N=SliderPin(0.0, 9.0, 1.0)),
         node(2, "Number Slider", N=SliderPin(0.0, 9.0, 2.0)),
         node(3, "Circle")],
        [ScriptEdge(1, "N", 3, "Radius"), ScriptEdge(2, "N", 3, "Radius")],
    )
    diags = validate(d, catalog)
    r7 = [d for d in diags if d.rule == "R7"]
    assert len(r7) == 1
    assert r7[0].severity == "warning"
    repair = r7[0].repair
    assert repair is not None and repair.kind == "delete_edge"
    assert repair.edge == ((2, "N"), (3, "Radius"))


def test_multi_edges_fine_on_list_ports(catalog):
    d = doc(
        [node(1, "Construct Point"), node(2, "Construct Point", X=1.0),
         node(3, "Polyline")],
        [ScriptEdge(1, "Pt", 3, "Vertices"), ScriptEdge(2, "Pt", 3, "Vertices")],
    )
    diags = validate(d, catalog)
    assert not any(d.rule == "R7" for d in diags)


def test_cycle_yields_single_error(catalog):
    d = doc(
        [node(1, "Addition", B=1.0), node(2, "Addition", B=1.0)],
        [ScriptEdge(1, "Result", 2, "A"), ScriptEdge(2, "Result", 1, "A")],
    )
    diags = validate(d, catalog)
    assert [d.rule for d in diags] == ["cycle"]
    assert diags[0].severity == "error"
    assert diags[0].node == 1


def test_repair_ids_sequential_in_diagnostic_order(catalog):
    d = doc(
        [node(1, "Number Slider", N=SliderPin(0.0, 9.0, 1.0)),
         node(2, "Move"), node(3, "Construct Point"), node(4, "Circle")],
        [ScriptEdge(1, "N", 2, "Motion"), ScriptEdge(3, "Pt", 2, "Geometry")],
    )
    diags = validate(d, catalog)
    repairs = [d.repair for d in diags if d.repair is not None]
    assert [r.id for r in repairs] == [f"r{i}" for i in range(len(repairs))]


def test_fuzzy_resolution_reported_as_info(catalog):
    d = doc([node(1, "Cricle", Radius=1.0)])
    diags = validate(d, catalog)
    fuzzy = [d for d in diags if d.rule == "fuzzy-component"]
    assert len(fuzzy) == 1
    assert fuzzy[0].severity == "info"
    # the name already resolved; nothing needs mechanical repair
    assert fuzzy[0].repair is None


def test_apply_rename_component(catalog):
    d = doc([node(1, "Circlonk", Radius=1.0)])
    diags = validate(d, catalog)
    repairs = select_compatible([x.repair for x in diags if x.repair])
    fixed = apply_repairs(d, repairs)
    assert fixed.nodes[0].component == "Circle"
    assert validate(fixed, catalog) == []


def test_apply_insert_default(catalog):
    d = doc([node(1, "Circle")])
    diags = validate(d, catalog)
    repairs = select_compatible([x.repair for x in diags if x.repair])
    fixed = apply_repairs(d, repairs)
    assert fixed.nodes[0].pins["Radius"] == 1.0
    assert validate(fixed, catalog) == []


def test_apply_delete_edge(catalog):
    d = doc(
        [node(1, "Number Slider", N=SliderPin(0.0, 9.0, 1.0)),
         node(2, "Number Slider", N=SliderPin(0.0, 9.0, 2.0)),
         node(3, "Circle")],
        [ScriptEdge(1, "N", 3, "Radius"), ScriptEdge(2, "N", 3, "Radius")],
    )
    diags = validate(d, catalog)
    repairs = select_compatible([x.repair for x in diags if x.repair])
    fixed = apply_repairs(d, repairs)
    assert len(fixed.edges) == 1
    assert fixed.edges[0].from_id == 1


def test_apply_unknown_edge_raises(catalog):
    d = doc([node(1, "Circle", Radius=1.0)])
    diags = validate(
        doc(
            [node(1, "Number Slider", N=SliderPin(0.0, 9.0, 1.0)),
             node(2, "Number Slider", N=SliderPin(0.0, 9.0, 2.0)),
             node(3, "Circle")],
            [ScriptEdge(1, "N", 3, "Radius"), ScriptEdge(2, "N", 3, "Radius")],
        ),
        catalog,
    )
    repairs = [x.repair for x in diags if x.repair]
    with pytest.raises(ValueError, match="edge"):
        apply_repairs(d, repairs)


def test_select_compatible_drops_conflicts(catalog):
    from scriptflow.lint import Repair

    a = Repair(id="r0", kind="delete_edge", edge=((1, "N"), (3, "Radius")))
    b = Repair(id="r1", kind="delete_edge", edge=((1, "N"), (3, "Radius")))
    c = Repair(id="r2", kind="delete_edge", edge=((2, "N"), (3, "Radius")))
    assert select_compatible([a, b, c]) == [a, c]


def test_apply_repairs_never_increases_errors(catalog):
    rng = random.Random(2025)
    for _ in range(150):
        d = random_clean_document(rng)
        if rng.random() < 0.7:
            d, _ = inject_type_mismatch(d, rng)
        diags = validate(d, catalog)
        before = count_errors(diags)
        repairs = select_compatible([x.repair for x in diags if x.repair])
        if not repairs:
            continue
        fixed = apply_repairs(d, repairs)
        # output is canonical and strictly parseable
        assert parse_document_strict(serialize(fixed)) == fixed
        after = count_errors(validate(fixed, catalog))
        assert after <= before, serialize(d)


def test_render_diagnostics_json_shape(catalog):
    d = doc(
        [node(1, "Number Slider", N=SliderPin(0.0, 9.0, 1.0)),
         node(2, "Move"), node(3, "Construct Point")],
        [ScriptEdge(1, "N", 2, "Motion"), ScriptEdge(3, "Pt", 2, "Geometry")],
    )
    text = render_diagnostics_json(validate(d, catalog))
    assert text.endswith("\n")
    payload = json.loads(text)
    assert payload["schema_version"] == 1
    assert isinstance(payload["diagnostics"], list)
    first = payload["diagnostics"][0]
    assert {"rule", "severity", "message"} <= set(first)
    assert json.dumps(payload, separators=(",", ":"), ensure_ascii=False) + "\n" == text


def test_render_diagnostics_json_empty(catalog):
    assert json.loads(render_diagnostics_json(()))["diagnostics"] == []
