"""Static checks and mechanical repair on a document with known faults.

The bridge scene ships with two type mismatches, two starved required
inputs and an island of nodes that never reaches a drawable sink.  This
walks the diagnostics, applies the compatible repairs and shows what
remains (repairs are local edits, not a solver: deleting a bad edge can
surface a missing-input error on the node it used to feed).
"""
import importlib.resources

from scriptflow.lint import apply_repairs, select_compatible, validate
from scriptflow.registry import load_catalog
from scriptflow.wire import parse_document_strict


def main() -> None:
    catalog = load_catalog()
    fixtures = importlib.resources.files("scriptflow.agents") / "fixtures"
    text = (fixtures / "bridge.pscript.json").read_text(encoding="utf-8")
    document = parse_document_strict(text)

    diagnostics = validate(document, catalog)
    print("before:")
    for diag in diagnostics:
        tag = f" [{diag.repair.id}]" if diag.repair else ""
        print(f"  {diag.severity:<7} {diag.rule} node={diag.node}: {diag.message}{tag}")

    repairs = select_compatible([d.repair for d in diagnostics if d.repair])
    repaired = apply_repairs(document, repairs)
    print(f"\napplied {len(repairs)} repair(s): {[r.kind for r in repairs]}")

    print("\nafter:")
    for diag in validate(repaired, catalog):
        print(f"  {diag.severity:<7} {diag.rule} node={diag.node}: {diag.message}")


if __name__ == "__main__":
    main()
