"""Command-line front door: validate, run, explore, export, serve.

Exit codes: 0 ok, 1 validation/strategy failure, 2 I/O or environment
trouble, 3 step-limit exceeded.  Diagnostics go to stderr as
`file:line:col: code: message` lines; results go to stdout as `key=value`
lines so scripts can scrape them.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .dsl import assemble_document, parse_source, parse_strategy
from .errors import (
    DocumentError,
    InetError,
    ParseError,
    ResolveError,
    StepLimitExceeded,
)
from .export import export_dot, export_trace_json, net_to_json
from .printer import net_document
from .rules import RedexSet
from .strategy import DEFAULT_MAX_STEPS, elaborate, eval_strategy
from .trace import explore as explore_node
from .trace import iso_classes, run_strategy

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_IO = 2
EXIT_LIMIT = 3


def _diag(path: str, line: int, col: int, code: str, message: str) -> None:
    print(f"{path}:{line}:{col}: {code}: {message}", file=sys.stderr)


def _report_error(path: str, exc: Exception) -> None:
    if isinstance(exc, ParseError):
        _diag(path, exc.line, exc.col, "SyntaxError", exc.message)
    elif isinstance(exc, ResolveError):
        _diag(path, exc.line, exc.col, exc.code, exc.message)
    elif isinstance(exc, DocumentError):
        for v in exc.violations:
            _diag(path, v.line, v.col, v.code, v.message)
    else:
        print(f"{path}: {exc}", file=sys.stderr)


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _write(path: str, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")


def _cap(args: argparse.Namespace) -> int:
    if getattr(args, "max_steps", None) is not None:
        if args.max_steps < 1:
            raise ValueError("--max-steps must be at least 1")
        return args.max_steps
    env = os.environ.get("INETC_MAX_STEPS")
    if env:
        try:
            value = int(env)
        except ValueError:
            raise ValueError(f"INETC_MAX_STEPS is not a number: {env!r}") from None
        if value < 1:
            raise ValueError("INETC_MAX_STEPS must be at least 1")
        return value
    return DEFAULT_MAX_STEPS


def cmd_validate(args: argparse.Namespace) -> int:
    try:
        text = _read(args.path)
    except OSError as exc:
        print(f"{args.path}: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        src = parse_source(text)
        if not src.nets:
            raise ResolveError("MissingNet", "document has no net block")
        main = "main" if "main" in src.nets else next(iter(src.nets))
        assemble_document(src, main)
    except (ParseError, ResolveError, DocumentError) as exc:
        _report_error(args.path, exc)
        return EXIT_FAIL
    return EXIT_OK


def _load_document(args: argparse.Namespace):
    text = _read(args.path)
    src = parse_source(text)
    return src, assemble_document(src, args.net)


def _write_net(path: str, doc, net) -> None:
    if path.endswith(".json"):
        _write(path, net_to_json(net))
    else:
        _write(path, net_document(doc.signature, net))


def cmd_run(args: argparse.Namespace) -> int:
    try:
        cap = _cap(args)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_IO
    try:
        _, doc = _load_document(args)
    except OSError as exc:
        print(f"{args.path}: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ParseError, ResolveError, DocumentError) as exc:
        _report_error(args.path, exc)
        return EXIT_FAIL

    named = args.strategy in doc.strategies
    try:
        spec = args.strategy if named else parse_strategy(args.strategy)
    except ParseError as exc:
        _report_error("<strategy>", exc)
        return EXIT_FAIL

    try:
        if args.trace_out:
            status, new_ids = run_strategy(doc, doc.trace.root, spec, max_steps=cap)
            steps = sum(len(doc.trace.edges[nid][1].steps) for nid in new_ids)
            final = doc.trace.nodes[new_ids[-1]] if new_ids else doc.m0
        else:
            expr = doc.strategies[spec] if named else spec
            net = doc.m0
            outcome = eval_strategy(net, RedexSet.from_net(net), doc.rules,
                                    elaborate(expr), cap)
            status, steps, final = outcome.status, len(outcome.steps), net
    except StepLimitExceeded as exc:
        print("status=error")
        print("error=StepLimitExceeded")
        print(str(exc), file=sys.stderr)
        return EXIT_LIMIT
    except InetError as exc:
        _report_error(args.path, exc)
        return EXIT_FAIL

    print(f"status={status}")
    print(f"steps={steps}")
    print(f"normal_form={'true' if final.is_normal_form() else 'false'}")
    try:
        if args.out:
            _write_net(args.out, doc, final)
        if args.trace_out:
            _write(args.trace_out, export_trace_json(doc))
    except OSError as exc:
        print(f"write failed: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK if status == "success" else EXIT_FAIL


def cmd_explore(args: argparse.Namespace) -> int:
    try:
        _, doc = _load_document(args)
    except OSError as exc:
        print(f"{args.path}: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ParseError, ResolveError, DocumentError) as exc:
        _report_error(args.path, exc)
        return EXIT_FAIL

    frontier = [doc.trace.root]
    for _ in range(args.depth):
        grown: list[int] = []
        for node in frontier:
            grown.extend(explore_node(doc, node))
        if not grown:
            break
        frontier = grown
    print(f"nodes={len(doc.trace.nodes)}")
    print(f"edges={len(doc.trace.edges)}")
    print(f"iso_classes={len(iso_classes(doc))}")
    if args.trace_out:
        try:
            _write(args.trace_out, export_trace_json(doc))
        except OSError as exc:
            print(f"write failed: {exc}", file=sys.stderr)
            return EXIT_IO
    return EXIT_OK


def cmd_export(args: argparse.Namespace) -> int:
    try:
        text = _read(args.path)
    except OSError as exc:
        print(f"{args.path}: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        src = parse_source(text)
    except (ParseError, ResolveError) as exc:
        _report_error(args.path, exc)
        return EXIT_FAIL
    net = src.nets.get(args.net)
    if net is None:
        print(f"{args.path}: no net named {args.net!r}", file=sys.stderr)
        return EXIT_FAIL
    rendered = export_dot(net) if args.format == "dot" else net_to_json(net)
    if args.out:
        try:
            _write(args.out, rendered)
        except OSError as exc:
            print(f"write failed: {exc}", file=sys.stderr)
            return EXIT_IO
    else:
        sys.stdout.write(rendered)
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="inetc", description="interaction net engine")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse and validate a document")
    p.add_argument("path")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("run", help="run a strategy from a document's net")
    p.add_argument("path")
    p.add_argument("--strategy", required=True,
                   help="strategy text, or the name of a document strategy")
    p.add_argument("--net", default="main")
    p.add_argument("--max-steps", type=int, default=None)
    p.add_argument("--out", default=None, help="write the final net (.inet or .json)")
    p.add_argument("--trace-out", default=None, help="record and write trace JSON")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("explore", help="breadth-first explore of the rewrite tree")
    p.add_argument("path")
    p.add_argument("--net", default="main")
    p.add_argument("--depth", type=int, default=1)
    p.add_argument("--trace-out", default=None)
    p.set_defaults(func=cmd_explore)

    p = sub.add_parser("export", help="render a net as dot or json")
    p.add_argument("path")
    p.add_argument("--format", choices=("dot", "json"), required=True)
    p.add_argument("--net", default="main")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("serve", help="start the session service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
