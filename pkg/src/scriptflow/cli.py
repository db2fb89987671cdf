"""Command-line interface.

Exit codes: 0 success, 1 usage or input problems (unreadable file,
backend failure), 2 the document has error diagnostics (validate) or
failing nodes (eval).  JSON output modes print canonical bytes so runs
can be diffed and piped.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .agents.backends import BackendConfig, make_backend
from .agents.pipeline import StageError, persist_run, run_pipeline, transcript_to_json
from .diagnostics import Diagnostic, count_errors
from .evaluator import evaluate, result_to_json
from .geometry import drawables_to_obj, format_value
from .graph import GraphCycleError
from .lint import apply_repairs, render_diagnostics_json, select_compatible, validate
from .registry import CatalogError, load_catalog
from .wire import ParseError, ScriptDocument, dumps_canonical, parse_document_strict, serialize

PROG = "scriptflow"


class CliError(Exception):
    """User-facing failure; message goes to stderr, exit code 1."""


def _load_document(path: str) -> ScriptDocument:
    file_path = Path(path)
    try:
        text = file_path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc
    try:
        return parse_document_strict(text)
    except ParseError as exc:
        raise CliError(f"{path}: {exc}") from exc


def _load_catalog(path: str | None):
    try:
        return load_catalog(path)
    except (OSError, CatalogError, ValueError) as exc:
        raise CliError(f"cannot load catalog: {exc}") from exc


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    Path(out).parent.mkdir(parents=True, exist_ok=True)
    Path(out).write_text(text, encoding="utf-8")


def _format_diag(diag: Diagnostic) -> str:
    parts = [f"{diag.severity:<7}", diag.rule]
    if diag.node is not None:
        parts.append(f"node {diag.node}")
    if diag.port is not None:
        parts.append(f"port {diag.port!r}")
    line = " ".join(parts) + f": {diag.message}"
    if diag.repair is not None:
        line += f"  [{diag.repair.id}: {diag.repair.kind}]"
    return line


def _backend_from_args(args: argparse.Namespace):
    config = BackendConfig.from_env()
    if args.backend:
        config = replace(config, backend=args.backend)
    if getattr(args, "fixtures", None):
        config = replace(config, fixtures_dir=Path(args.fixtures))
    return make_backend(config)


def cmd_generate(args: argparse.Namespace) -> int:
    backend = _backend_from_args(args)
    catalog = _load_catalog(args.catalog)
    try:
        result = run_pipeline(args.prompt, backend, catalog)
    except StageError as exc:
        raise CliError(str(exc)) from exc
    if args.out:
        transcript_path, script_path = persist_run(args.out, result)
        print(f"wrote {transcript_path}", file=sys.stderr)
        print(f"wrote {script_path}", file=sys.stderr)
    if args.json:
        _emit(dumps_canonical(transcript_to_json(result.transcript)) + "\n", None)
    else:
        for record in result.transcript.stages:
            print(f"stage {record.stage}: ok (attempt {record.attempts})", file=sys.stderr)
        doc = result.document
        print(f"document: {len(doc.nodes)} nodes, {len(doc.edges)} edges", file=sys.stderr)
        if not args.out:
            _emit(serialize(doc) + "\n", None)
    return 0


def cmd_validate(args: argparse.Namespace) -> int:
    document = _load_document(args.file)
    catalog = _load_catalog(args.catalog)
    diagnostics = validate(document, catalog)
    if args.json:
        _emit(render_diagnostics_json(diagnostics), args.out)
    else:
        lines = [_format_diag(d) for d in diagnostics]
        errors = count_errors(diagnostics)
        warnings = sum(1 for d in diagnostics if d.severity == "warning")
        infos = len(diagnostics) - errors - warnings
        lines.append(f"{errors} error(s), {warnings} warning(s), {infos} info(s)")
        _emit("\n".join(lines) + "\n", args.out)
    return 2 if count_errors(diagnostics) else 0


def cmd_repair(args: argparse.Namespace) -> int:
    document = _load_document(args.file)
    catalog = _load_catalog(args.catalog)
    diagnostics = validate(document, catalog)
    suggested = [d.repair for d in diagnostics if d.repair is not None]
    applied = select_compatible(suggested)
    repaired = apply_repairs(document, applied) if applied else document
    if args.json:
        payload = {
            "schema_version": 1,
            "applied": [r.to_json() for r in applied],
            "document": None,
        }
        from .wire import document_to_json

        payload["document"] = document_to_json(repaired)
        _emit(dumps_canonical(payload) + "\n", args.out)
    else:
        for repair in applied:
            print(f"applied {repair.id}: {repair.kind}", file=sys.stderr)
        print(f"{len(applied)} repair(s) applied", file=sys.stderr)
        _emit(serialize(repaired) + "\n", args.out)
    return 0


def _parse_overrides(pairs: list[str]) -> dict[int, float]:
    overrides: dict[int, float] = {}
    for pair in pairs:
        if "=" not in pair:
            raise CliError(f"--set expects NODE=VALUE, got {pair!r}")
        node, _, value = pair.partition("=")
        try:
            overrides[int(node)] = float(value)
        except ValueError as exc:
            raise CliError(f"--set expects NODE=VALUE numbers, got {pair!r}") from exc
    return overrides


def cmd_eval(args: argparse.Namespace) -> int:
    document = _load_document(args.file)
    catalog = _load_catalog(args.catalog)
    try:
        result = evaluate(document, catalog, _parse_overrides(args.set))
    except GraphCycleError as exc:
        raise CliError(str(exc)) from exc
    if args.json:
        payload = result_to_json(result, meshes=not args.no_meshes)
        _emit(dumps_canonical(payload) + "\n", args.out)
    else:
        lines = []
        for node_id in result.order:
            for port, value in result.per_node[node_id].items():
                lines.append(f"node {node_id} {port} = {format_value(value)}")
        lines.append(f"failures: {list(result.failures)}")
        lines.append(f"origins: {list(result.origins())}")
        lines.append(f"drawables: {[node for node, _ in result.drawables]}")
        for note in result.notes:
            lines.append(_format_diag(note))
        _emit("\n".join(lines) + "\n", args.out)
    return 2 if result.failures else 0


def cmd_render(args: argparse.Namespace) -> int:
    document = _load_document(args.file)
    catalog = _load_catalog(args.catalog)
    try:
        result = evaluate(document, catalog)
    except GraphCycleError as exc:
        raise CliError(str(exc)) from exc
    obj_text = drawables_to_obj(
        list(result.drawables), u_count=args.u_count, v_count=args.v_count
    )
    _emit(obj_text, args.out)
    if args.out and args.out != "-":
        print(f"wrote {args.out} ({len(result.drawables)} drawable(s))", file=sys.stderr)
    return 0


def cmd_registry(args: argparse.Namespace) -> int:
    catalog = _load_catalog(args.catalog)
    if args.json:
        from .registry import catalog_to_json

        _emit(dumps_canonical(catalog_to_json(catalog)) + "\n", args.out)
    else:
        from .agents.templates import catalog_summary

        _emit(catalog_summary(catalog, ports=True) + "\n", args.out)
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    config = BackendConfig.from_env()
    if args.backend:
        config = replace(config, backend=args.backend)
    if args.fixtures:
        config = replace(config, fixtures_dir=Path(args.fixtures))
    catalog = _load_catalog(args.catalog)
    frontend = Path(args.frontend) if args.frontend else None
    app = create_app(config=config, catalog=catalog, frontend=frontend)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=PROG, description="Generate, check and run parametric script documents."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, catalog: bool = True, out: bool = True) -> None:
        if catalog:
            p.add_argument("--catalog", help="catalog JSON file (default: built-in)")
        if out:
            p.add_argument("-o", "--out", help="output file (default: stdout)")

    p = sub.add_parser("generate", help="turn a prompt into a script document")
    p.add_argument("prompt")
    p.add_argument("--backend", choices=("mock", "live"), help="default: SF_BACKEND or mock")
    p.add_argument("--fixtures", help="mock fixtures directory")
    p.add_argument("--json", action="store_true", help="print the full transcript as JSON")
    p.add_argument("-o", "--out", help="run directory for transcript.json + script.pscript.json")
    p.add_argument("--catalog", help="catalog JSON file (default: built-in)")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("validate", help="static checks on a .pscript.json file")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")
    common(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("repair", help="apply suggested mechanical repairs")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")
    common(p)
    p.set_defaults(func=cmd_repair)

    p = sub.add_parser("eval", help="evaluate a document and print its values")
    p.add_argument("file")
    p.add_argument("--json", action="store_true")
    p.add_argument("--no-meshes", action="store_true", help="omit surface meshes in JSON")
    p.add_argument("--set", action="append", default=[], metavar="NODE=VALUE",
                   help="override a Number Slider value (repeatable)")
    common(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("render", help="export drawable geometry as Wavefront OBJ")
    p.add_argument("file")
    p.add_argument("--u-count", type=int, default=32)
    p.add_argument("--v-count", type=int, default=16)
    common(p)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("registry", help="list the component catalog")
    p.add_argument("--json", action="store_true")
    common(p)
    p.set_defaults(func=cmd_registry)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=7878)
    p.add_argument("--backend", choices=("mock", "live"))
    p.add_argument("--fixtures", help="mock fixtures directory")
    p.add_argument("--frontend", help="static frontend directory to mount at /")
    p.add_argument("--catalog", help="catalog JSON file (default: built-in)")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"{PROG}: {exc}", file=sys.stderr)
        return 1
    except BrokenPipeError:
        return 0


if __name__ == "__main__":
    sys.exit(main())
