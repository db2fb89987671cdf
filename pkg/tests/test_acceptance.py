"""Acceptance checks for the primary component.

One test per shipping criterion.  Each prints a single
``ACCEPTANCE <name>: PASS (<detail>)`` line on success (visible with
``-rA`` or ``-s``); under ``pytest -v`` every criterion also gets its
own PASSED/FAILED row.  Tolerances are stated inline and are not
looser than the ones the library itself promises.
"""
import json
import math
import random
import socket
import time

import pytest

from scriptflow.agents.backends import MockBackend
from scriptflow.agents.pipeline import run_pipeline, transcript_to_json
from scriptflow.cli import main
from scriptflow.evaluator import evaluate
from scriptflow.geometry import (
    CircleCurve,
    Extrusion,
    LineSeg,
    ListV,
    LoftSurface,
    NurbsCurve,
    Point,
    PolylineCurve,
    Vector,
    divide_points,
    mesh_area,
    point_at,
    sample_mesh,
)
from scriptflow.lint import validate
from scriptflow.randomdocs import (
    inject_type_mismatch,
    random_clean_document,
    random_wire_document,
)
from scriptflow.registry import normalize, resolve_name
from scriptflow.wire import (
    dumps_canonical,
    parse_document_strict,
    parse_document_tolerant,
    serialize,
)

from test_registry import _corrupt, dp_levenshtein

UMBRELLA = "Model a beach umbrella: a pole with a lofted canopy of shrinking circles."
BRIDGE = "Sketch a suspension bridge elevation with towers, deck and hanging cables."


def report(name: str, detail: str) -> None:
    print(f"ACCEPTANCE {name}: PASS ({detail})")


def rules(diags):
    out: dict[str, int] = {}
    for d in diags:
        out[d.rule] = out.get(d.rule, 0) + 1
    return out


def test_golden_corpus_truss(catalog, capsys):
    started = time.perf_counter()
    assert main(["generate", "a truss", "--backend", "mock", "--json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    document = parse_document_strict(dumps_canonical(payload["document"]))
    diags = validate(document, catalog)
    result = evaluate(document, catalog)
    elapsed = time.perf_counter() - started

    counts = rules(diags)
    assert counts.get("R5", 0) == 1, counts
    for rule in ("R1", "R2", "R3"):
        assert counts.get(rule, 0) == 0, counts

    polylines = [v for _, v in result.drawables if isinstance(v, PolylineCurve)]
    assert len(polylines) >= 2
    cross = [
        v for _, v in result.drawables
        if isinstance(v, ListV) and v.items
        and all(isinstance(item, LineSeg) for item in v.items)
    ]
    assert cross, "no cross-connection line drawables"
    assert elapsed < 1.0, f"{elapsed:.3f}s"
    report("golden-corpus-truss",
           f"one R5, {len(polylines)} polylines, "
           f"{len(cross[0].items)} cross lines, {elapsed * 1000:.0f}ms")


def test_golden_corpus_umbrella(catalog, fixtures_dir):
    started = time.perf_counter()
    run = run_pipeline(UMBRELLA, MockBackend(fixtures_dir), catalog)
    result = evaluate(run.document, catalog)
    elapsed = time.perf_counter() - started

    assert len(result.failures) == 2
    components = {n.id: n.component for n in run.document.nodes}
    by_component = {components[node_id]: node_id for node_id in result.failures}
    assert set(by_component) == {"Extrude Linear", "Move"}

    messages = {}
    for node_id in result.failures:
        errors = [
            v for v in result.per_node[node_id].values()
            if getattr(v, "origin", None) == node_id
        ]
        assert errors, f"node {node_id} has no own-origin error value"
        messages[components[node_id]] = errors[0].message
    assert messages["Extrude Linear"] == (
        "Extrude Linear requires an axis vector, not a number"
    )
    assert messages["Move"] == "Move requires a vector input"

    drawable_ids = [n for n, _ in result.drawables]
    kinds = {n: type(v).__name__ for n, v in result.drawables}
    assert any(kinds[n] == "LoftSurface" for n in drawable_ids), kinds
    assert any(kinds[n] == "LineSeg" for n in drawable_ids), kinds
    assert elapsed < 1.0, f"{elapsed:.3f}s"
    report("golden-corpus-umbrella",
           f"failures at nodes {result.failures}, verbatim messages, "
           f"drawables {drawable_ids}, {elapsed * 1000:.0f}ms")


def test_golden_corpus_bridge(catalog, fixtures_dir):
    run = run_pipeline(BRIDGE, MockBackend(fixtures_dir), catalog)
    diags = validate(run.document, catalog)
    counts = rules(diags)
    structural = sum(counts.get(rule, 0) for rule in ("R3", "R4", "R6"))
    assert structural >= 3, counts
    assert counts.get("R6", 0) >= 1, counts  # sink-starved subgraph
    result = evaluate(run.document, catalog)  # must not raise
    report("golden-corpus-bridge",
           f"{structural} diagnostics in R3/R4/R6, {counts.get('R6', 0)} "
           f"starved subgraph(s), evaluated with {len(result.failures)} failures")


def test_wire_roundtrip_1000_documents():
    rng = random.Random(1000003)
    for i in range(1000):
        doc = random_wire_document(rng)
        text = serialize(doc)
        assert parse_document_strict(text) == doc, f"doc {i}"
        tolerant, notes = parse_document_tolerant(text)
        assert tolerant == doc, f"doc {i}"
        assert notes == [], f"doc {i}: {notes}"
    report("wire-roundtrip", "1000 documents, strict==tolerant==identity")


def test_validator_evaluator_contract_500_graphs(catalog):
    rng = random.Random(500009)
    clean_checked = injected_checked = 0
    for i in range(500):
        doc = random_clean_document(rng)
        if i % 2 == 0:
            diags = validate(doc, catalog)
            errors = [d for d in diags if d.severity == "error"]
            assert errors == [], serialize(doc)
            result = evaluate(doc, catalog)
            assert result.failures == (), serialize(doc)
            clean_checked += 1
        else:
            broken, target = inject_type_mismatch(doc, rng)
            r3 = [d for d in validate(broken, catalog) if d.rule == "R3"]
            assert len(r3) == 1 and r3[0].node == target, serialize(broken)
            result = evaluate(broken, catalog)
            assert result.origins() == (target,), serialize(broken)
            injected_checked += 1
    report("validator-evaluator-contract",
           f"{clean_checked} clean graphs failure-free, "
           f"{injected_checked} R3 edges each one ErrorV origin")


def test_geometry_oracles():
    origin = Point(0.0, 0.0, 0.0)
    z = Vector(0.0, 0.0, 1.0)

    cylinder = Extrusion(CircleCurve(origin, z, 1.0), Vector(0.0, 0.0, 2.0))
    cyl_area = mesh_area(sample_mesh(cylinder, 64, 32))
    assert abs(cyl_area - 4 * math.pi) / (4 * math.pi) < 0.01

    annulus = LoftSurface((CircleCurve(origin, z, 1.0), CircleCurve(origin, z, 2.0)))
    ann_area = mesh_area(sample_mesh(annulus, 64, 32))
    assert abs(ann_area - 3 * math.pi) / (3 * math.pi) < 0.01

    patch = Extrusion(
        LineSeg(Point(0.0, 0.0, 0.0), Point(3.0, 0.0, 0.0)), Vector(0.0, 2.0, 0.0)
    )
    assert abs(mesh_area(sample_mesh(patch, 8, 8)) - 6.0) < 1e-6

    rng = random.Random(271828)
    for _ in range(100):
        count = rng.randrange(2, 9)
        control = tuple(
            Point(rng.uniform(-10, 10), rng.uniform(-10, 10), rng.uniform(-10, 10))
            for _ in range(count)
        )
        curve = NurbsCurve(control, degree=min(3, count - 1))
        for got, want in ((point_at(curve, 0.0), control[0]),
                          (point_at(curve, 1.0), control[-1])):
            assert abs(got.x - want.x) < 1e-9
            assert abs(got.y - want.y) < 1e-9
            assert abs(got.z - want.z) < 1e-9

    circle = CircleCurve(origin, z, 5.0)
    pts = divide_points(circle, 12)
    chords = [
        math.dist((a.x, a.y, a.z), (b.x, b.y, b.z)) for a, b in zip(pts, pts[1:])
    ]
    mean = sum(chords) / len(chords)
    assert all(abs(c - mean) / mean < 1e-6 for c in chords)

    report("geometry-oracles",
           f"cylinder {cyl_area:.4f}~4pi, annulus {ann_area:.4f}~3pi, "
           "planar exact, 100 B-spline endpoint pairs, uniform chords")


def test_registry_fuzzing(catalog):
    for spec in catalog.components:
        for name in (spec.name, *spec.aliases):
            res = resolve_name(catalog, name)
            assert res.kind == "exact" and res.spec is spec, name

    rng = random.Random(424243)
    recovered = 0
    for _ in range(1000):
        spec = rng.choice(catalog.components)
        corrupted = _corrupt(rng, spec.name, rng.choice((1, 2)))
        res = resolve_name(catalog, corrupted)
        if res.kind in ("exact", "fuzzy") and res.spec is not None:
            if res.spec is spec:
                recovered += 1
            else:
                target = normalize(corrupted)
                d_winner = dp_levenshtein(target, normalize(res.spec.name))
                d_source = min(
                    dp_levenshtein(target, normalize(n))
                    for n in (spec.name, *spec.aliases)
                )
                assert d_winner < d_source, (
                    f"{corrupted!r} (from {spec.name!r}) wrongly resolved "
                    f"to {res.spec.name!r}"
                )
    assert recovered >= 950, f"recovered {recovered}/1000"
    report("registry-fuzzing",
           f"all names and aliases exact, {recovered}/1000 corruptions recovered, "
           "zero wrong resolutions")


def test_determinism_byte_identical_runs(catalog, fixtures_dir):
    backend = MockBackend(fixtures_dir)
    for prompt in ("a truss", UMBRELLA, BRIDGE):
        first = run_pipeline(prompt, backend, catalog)
        second = run_pipeline(prompt, backend, catalog)
        assert serialize(first.document) == serialize(second.document)
        assert (dumps_canonical(transcript_to_json(first.transcript))
                == dumps_canonical(transcript_to_json(second.transcript)))
    report("determinism", "3 prompts, byte-identical documents and transcripts")


def test_offline_guarantee(catalog, fixtures_dir):
    # the suite-wide guard rejects any non-loopback connect
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        with pytest.raises(RuntimeError, match="egress"):
            probe.connect(("203.0.113.1", 80))
    finally:
        probe.close()

    # the full stack works under that guard, with no frontend assets
    from scriptflow.service import create_app
    run = run_pipeline("a truss", MockBackend(fixtures_dir), catalog)
    app = create_app(catalog=catalog, frontend=None)
    import asyncio

    import httpx

    async def round_trip():
        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(transport=transport, base_url="http://sf") as c:
            return await c.post("/api/v1/validate", content=serialize(run.document))

    response = asyncio.run(round_trip())
    assert response.status_code == 200
    report("offline-guarantee",
           "egress blocked suite-wide, pipeline and service run loopback-only")
