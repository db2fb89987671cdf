"""Prompt construction for the three pipeline stages.

Each stage sees only the previous stage's output, never the raw user
prompt again; this keeps failures attributable to a single stage.
Template wording can change freely: replay keys hash the stage
payload, not the rendered prompt.
"""
from __future__ import annotations

from ..registry import Catalog
from .parsing import ComponentChain, DesignBrief, render_brief, render_chain

__all__ = ["stage1_prompt", "stage2_prompt", "stage3_prompt", "catalog_summary"]

_STAGE1 = """\
You turn a modelling request into a design brief.

Reply with exactly these sections:

INTENT: one sentence stating what is being modelled.
INPUTS:
- name: <parameter> | min: <number> | max: <number> | default: <number>
LOGIC:
1. numbered construction steps, one per line.
NOTES:
- optional caveats.

Use one INPUTS line per adjustable parameter (possibly none).
Do not add other sections or commentary.

REQUEST:
{prompt}
"""

_STAGE2 = """\
You turn a design brief into a linear chain of components.

Available components:
{catalog}

Reply with exactly these sections:

CHAIN:
- label: <snake_case> | component: <name from the list> | inputs: <Port>=<binding>, ...
NOTES:
- optional caveats.

Bindings are either @label (output of an earlier step), a number, or a
"quoted string".  Number Slider steps take pseudo-inputs min, max and
value instead of ports.  Every adjustable brief input becomes one
Number Slider step.  Later steps may only reference earlier labels.

BRIEF:
{brief}
"""

_STAGE3 = """\
You turn a component chain into a wire-format script document.

Component ports:
{catalog}

Reply with a single JSON object inside a ```json fence:
{{"schema_version": 1, "nodes": [...], "edges": [...]}}

Each node: {{"id": <int>, "component": "<name>", "position": {{"x": <num>, "y": <num>}},
"pins": {{"<Port>": <number | string | {{"slider": {{"min","max","value"}}}}>}}}}.
Each edge: {{"from": {{"id", "port"}}, "to": {{"id", "port"}}}}.
Assign ids in chain order starting at 1.  Bind @label references as
edges from the first output port of the referenced node; bind literal
inputs as pins.  Slider pseudo-inputs become one slider pin on "N".

CHAIN:
{chain}
"""


def catalog_summary(catalog: Catalog, ports: bool = False) -> str:
    """One line per component; with `ports`, full signatures."""
    lines = []
    for spec in catalog.components:
        if not ports:
            lines.append(f"- {spec.name} ({spec.category})")
            continue
        def side(specs) -> str:
            parts = []
            for p in specs:
                flags = p.kind + ("[]" if p.cardinality == "list" else "")
                if p.required:
                    flags += ", required"
                parts.append(f"{p.name}: {flags}")
            return "; ".join(parts) or "none"
        lines.append(f"- {spec.name} | in: {side(spec.inputs)} | out: {side(spec.outputs)}")
    return "\n".join(lines)


def stage1_prompt(prompt: str) -> str:
    return _STAGE1.format(prompt=prompt.strip())


def stage2_prompt(brief: DesignBrief, catalog: Catalog) -> str:
    return _STAGE2.format(catalog=catalog_summary(catalog), brief=render_brief(brief))


def stage3_prompt(chain: ComponentChain, catalog: Catalog) -> str:
    return _STAGE3.format(catalog=catalog_summary(catalog, ports=True), chain=render_chain(chain))
