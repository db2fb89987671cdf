"""Prompt to geometry, fully offline.

Runs the recorded truss scene through the mock backend, prints the
stage transcript, then evaluates the document and writes an OBJ file
next to this script.
"""
from pathlib import Path

from scriptflow.agents.backends import BackendConfig, make_backend
from scriptflow.agents.pipeline import run_pipeline
from scriptflow.evaluator import evaluate
from scriptflow.geometry import drawables_to_obj, format_value
from scriptflow.registry import load_catalog

PROMPT = "Create a parametric truss with top and bottom chords joined by vertical posts."


def main() -> None:
    catalog = load_catalog()
    backend = make_backend(BackendConfig(backend="mock"))
    result = run_pipeline(PROMPT, backend, catalog)

    for record in result.transcript.stages:
        print(f"stage {record.stage}: key={record.key} attempts={record.attempts}")
    doc = result.document
    print(f"document: {len(doc.nodes)} nodes, {len(doc.edges)} edges")

    evaluation = evaluate(doc, catalog)
    for node_id, value in evaluation.drawables:
        print(f"drawable node {node_id}: {format_value(value)}")

    out = Path(__file__).with_name("truss.obj")
    out.write_text(drawables_to_obj(list(evaluation.drawables)))
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
