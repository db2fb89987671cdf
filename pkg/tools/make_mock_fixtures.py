#!/usr/bin/env python3
"""Regenerate the recorded mock-backend fixtures.

Builds the three demo scenes (truss, umbrella, bridge) end to end:
design brief, component chain, wire document.  Writes one fixture file
per pipeline stage plus the canonical .pscript.json document for each
scene into src/scriptflow/agents/fixtures/.

The umbrella and bridge scenes carry intentional mistakes (numbers
wired into vector ports, unfed required inputs, an orphan sub-graph)
so the validator and evaluator have something real to report.

Run from the repository root:  python3 tools/make_mock_fixtures.py
"""
from __future__ import annotations

import json
import sys
from pathlib import Path

from scriptflow.agents.backends import FIXTURES_DIR
from scriptflow.agents.parsing import (
    BriefInput,
    ChainBinding,
    ChainStep,
    ComponentChain,
    DesignBrief,
    canonical_prompt,
    key_for,
    render_brief,
    render_chain,
)
from scriptflow.registry import Catalog, builtin_catalog, normalize
from scriptflow.wire import (
    ScriptDocument,
    document_to_json,
    dumps_canonical,
    parse_document_tolerant,
    serialize,
)


def ref(port: str, label: str) -> ChainBinding:
    return ChainBinding(port, ref=label)


def lit(port: str, value: float | str) -> ChainBinding:
    return ChainBinding(port, value=value)


def slider(label: str, minimum: float, maximum: float, value: float) -> ChainStep:
    return ChainStep(
        label,
        "Number Slider",
        (lit("min", minimum), lit("max", maximum), lit("value", value)),
    )


TRUSS_PROMPT = "Create a parametric truss with top and bottom chords joined by vertical posts."
UMBRELLA_PROMPT = "Model a beach umbrella: a pole with a lofted canopy of shrinking circles."
BRIDGE_PROMPT = "Sketch a suspension bridge elevation with towers, deck and hanging cables."

TRUSS_BRIEF = DesignBrief(
    intent="A planar truss elevation: parallel top and bottom chords tied by vertical posts.",
    inputs=(
        BriefInput("length", 5, 100, 30),
        BriefInput("height", 1, 20, 5),
        BriefInput("posts", 2, 30, 6),
    ),
    logic=(
        "Divide the span length by the post count to get the bay width.",
        "Generate station offsets along the span, one per post.",
        "Construct bottom chord points at the stations and top chord points lifted by the height.",
        "Join each chord with a polyline and connect matching points with vertical lines.",
    ),
)

TRUSS_CHAIN = ComponentChain(
    (
        slider("length", 5, 100, 30),
        slider("height", 1, 20, 5),
        slider("posts", 2, 30, 6),
        ChainStep("bay", "Division", (ref("A", "length"), ref("B", "posts"))),
        ChainStep("stations", "Series", (ref("Step", "bay"), ref("Count", "posts"))),
        ChainStep("bottom", "Construct Point", (ref("X", "stations"),)),
        ChainStep("top", "Construct Point", (ref("X", "stations"), ref("Z", "height"))),
        ChainStep("chord_bottom", "Polyline", (ref("Vertices", "bottom"),)),
        ChainStep("chord_top", "Polyline", (ref("Vertices", "top"),)),
        ChainStep("rungs", "Line", (ref("Start", "bottom"), ref("End", "top"))),
        ChainStep("spare", "Series", (ref("Step", "bay"), ref("Count", "posts"))),
    ),
)

UMBRELLA_BRIEF = DesignBrief(
    intent="A beach umbrella: a vertical pole carrying a lofted canopy of shrinking rings.",
    inputs=(
        BriefInput("radius", 0.5, 5, 2),
        BriefInput("height", 1, 10, 3),
        BriefInput("segments", 2, 12, 5),
    ),
    logic=(
        "Construct an origin point at the base of the pole.",
        "Raise the pole as a line of the given height along the vertical axis.",
        "Stack ring levels upward, spacing them by height over segments.",
        "Shrink ring radii linearly from the full radius toward the tip.",
        "Loft the rings into the canopy surface and extrude a base skirt.",
    ),
    notes=("The skirt extrusion axis is bound to a plain number; expect a type failure there.",),
)

UMBRELLA_CHAIN = ComponentChain(
    (
        slider("radius", 0.5, 5, 2),
        slider("height", 1, 10, 3),
        slider("segments", 2, 12, 5),
        ChainStep("origin", "Construct Point"),
        ChainStep("up", "Unit Z"),
        ChainStep(
            "pole",
            "Line SDL",
            (ref("Start", "origin"), ref("Direction", "up"), ref("Length", "height")),
        ),
        ChainStep("drop", "Division", (ref("A", "height"), ref("B", "segments"))),
        ChainStep("levels", "Series", (ref("Step", "drop"), ref("Count", "segments"))),
        ChainStep("shrink", "Division", (ref("A", "radius"), ref("B", "segments"))),
        ChainStep("fall", "Negative", (ref("Value", "shrink"),)),
        ChainStep(
            "radii",
            "Series",
            (ref("Start", "radius"), ref("Step", "fall"), ref("Count", "segments")),
        ),
        ChainStep("centers", "Construct Point", (ref("Z", "levels"),)),
        ChainStep("rings", "Circle", (ref("Center", "centers"), ref("Radius", "radii"))),
        ChainStep("canopy", "Loft", (ref("Curves", "rings"),)),
        ChainStep("base", "Circle", (ref("Center", "origin"), ref("Radius", "radius"))),
        ChainStep("skirt", "Extrude Linear", (ref("Profile", "base"), ref("Axis", "height"))),
        ChainStep("shifted", "Move", (ref("Geometry", "base"), ref("Motion", "radius"))),
    ),
    notes=("skirt and shifted bind numbers where vectors belong.",),
)

BRIDGE_BRIEF = DesignBrief(
    intent="A suspension bridge elevation: deck, two towers and a sagging main cable.",
    inputs=(
        BriefInput("span", 10, 100, 40),
        BriefInput("tower_height", 5, 30, 12),
        BriefInput("cables", 2, 12, 4),
        BriefInput("spacing", 1, 10, 2),
    ),
    logic=(
        "Anchor the south tower base at the origin and the north base a span away.",
        "Lift both tower tops by the tower height and draw deck and towers as lines.",
        "Sweep the main cable as a curve through the tower tops and a low anchor.",
        "Space hanger offsets along the deck for the cable count.",
    ),
    notes=("Several connections are intentionally wrong to exercise the checks.",),
)

BRIDGE_CHAIN = ComponentChain(
    (
        slider("span", 10, 100, 40),
        slider("tower_height", 5, 30, 12),
        slider("cables", 2, 12, 4),
        ChainStep("south_base", "Construct Point"),
        ChainStep("north_base", "Construct Point", (ref("X", "span"),)),
        ChainStep("south_top", "Construct Point", (ref("Z", "tower_height"),)),
        ChainStep("north_top", "Construct Point", (ref("X", "span"), ref("Z", "tower_height"))),
        ChainStep("deck", "Line", (ref("Start", "south_base"), ref("End", "north_base"))),
        ChainStep("south_tower", "Line", (ref("Start", "south_base"), ref("End", "south_top"))),
        ChainStep("north_tower", "Line", (ref("Start", "north_base"), ref("End", "north_top"))),
        ChainStep("anchor", "Construct Point", (ref("X", "span"), lit("Z", 2))),
        ChainStep(
            "main_cable",
            "Nurbs Curve",
            (
                ref("Vertices", "south_top"),
                ref("Vertices", "north_top"),
                ref("Vertices", "anchor"),
            ),
        ),
        ChainStep("slide", "Move", (ref("Geometry", "north_base"), ref("Motion", "span"))),
        ChainStep("lift", "Move", (ref("Geometry", "south_top"), ref("Motion", "tower_height"))),
        slider("spacing", 1, 10, 2),
        ChainStep("offsets", "Series", (ref("Step", "spacing"), ref("Count", "cables"))),
        ChainStep("rail", "Polyline"),
        ChainStep("hanger", "Line SDL", (ref("Start", "anchor"),)),
    ),
    notes=("rail and hanger are left unfinished on purpose.",),
)


def chain_to_document(chain: ComponentChain, catalog: Catalog) -> ScriptDocument:
    """Compile a chain into a laid-out document, the way stage 3 should."""
    ids: dict[str, int] = {}
    components: dict[str, str] = {}
    nodes = []
    edges = []
    for index, step in enumerate(chain.steps, start=1):
        ids[step.label] = index
        spec = catalog.lookup(step.component)
        if spec is None:
            raise SystemExit(f"demo chain uses unknown component {step.component!r}")
        components[step.label] = spec.name
        pins: dict[str, object] = {}
        slider_parts: dict[str, float] = {}
        for binding in step.inputs:
            if binding.ref is not None:
                source = catalog.lookup(components[binding.ref])
                assert source is not None
                edges.append(
                    {
                        "from": {"id": ids[binding.ref], "port": source.outputs[0].name},
                        "to": {"id": index, "port": binding.port},
                    }
                )
            elif (
                normalize(spec.name) == "numberslider"
                and binding.port in ("min", "max", "value")
            ):
                slider_parts[binding.port] = float(binding.value)  # type: ignore[arg-type]
            else:
                pins[binding.port] = binding.value
        if slider_parts:
            pins["N"] = {"slider": slider_parts}
        nodes.append({"id": index, "component": spec.name, "pins": pins})
    raw = dumps_canonical({"schema_version": 1, "nodes": nodes, "edges": edges})
    document, _ = parse_document_tolerant(raw)  # assigns grid positions
    return document


def write_fixture(path: Path, stage: int, key: str, reply: str) -> None:
    payload = {"stage": stage, "key": key, "reply": reply}
    path.write_text(json.dumps(payload, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    print(f"  {path.name}  (stage {stage}, key {key})")


# Each scene also answers a terse prompt so short requests replay the
# same recorded run; stages 2-3 key off the brief/chain and are shared.
SCENES = [
    ("truss", TRUSS_PROMPT, "a truss", TRUSS_BRIEF, TRUSS_CHAIN),
    ("umbrella", UMBRELLA_PROMPT, "a beach umbrella", UMBRELLA_BRIEF, UMBRELLA_CHAIN),
    ("bridge", BRIDGE_PROMPT, "a suspension bridge", BRIDGE_BRIEF, BRIDGE_CHAIN),
]


def main() -> int:
    catalog = builtin_catalog()
    FIXTURES_DIR.mkdir(parents=True, exist_ok=True)
    for name, prompt, short_prompt, brief, chain in SCENES:
        print(f"{name}:")
        document = chain_to_document(chain, catalog)
        reply3 = "```json\n" + dumps_canonical(document_to_json(document)) + "\n```\n"
        write_fixture(
            FIXTURES_DIR / f"{name}_stage1.json", 1, key_for(canonical_prompt(prompt)),
            render_brief(brief),
        )
        write_fixture(
            FIXTURES_DIR / f"{name}_stage1_short.json", 1,
            key_for(canonical_prompt(short_prompt)), render_brief(brief),
        )
        write_fixture(
            FIXTURES_DIR / f"{name}_stage2.json", 2, key_for(brief.key_material()),
            render_chain(chain),
        )
        write_fixture(
            FIXTURES_DIR / f"{name}_stage3.json", 3, key_for(chain.key_material()), reply3
        )
        script = FIXTURES_DIR / f"{name}.pscript.json"
        script.write_text(serialize(document.with_prompt(prompt)) + "\n", encoding="utf-8")
        print(f"  {script.name}  ({len(document.nodes)} nodes, {len(document.edges)} edges)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
