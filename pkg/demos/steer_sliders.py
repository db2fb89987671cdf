"""Parameter steering without touching the document.

Evaluates the truss scene at several post counts by overriding the
Number Slider on node 3, the way a UI slider drag would.  The document
itself never changes; only the override map does.
"""
import importlib.resources

from scriptflow.evaluator import evaluate
from scriptflow.geometry import ListV
from scriptflow.registry import load_catalog
from scriptflow.wire import parse_document_strict


def main() -> None:
    catalog = load_catalog()
    fixtures = importlib.resources.files("scriptflow.agents") / "fixtures"
    document = parse_document_strict(
        (fixtures / "truss.pscript.json").read_text(encoding="utf-8")
    )

    for posts in (4, 6, 8, 40):
        result = evaluate(document, catalog, overrides={3: posts})
        rungs = result.per_node[10]["L"]
        count = len(rungs.items) if isinstance(rungs, ListV) else 1
        clamped = [n.message for n in result.notes if n.rule == "override-clamped"]
        note = f"  ({clamped[0]})" if clamped else ""
        print(f"posts={posts}: {count} vertical rung(s){note}")


if __name__ == "__main__":
    main()
