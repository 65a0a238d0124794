"""Command-line driver: parse, resolve, weave, query and generate.

Exit status is 0 on success, 1 on bad input (syntax, resolution, metadata
or generation errors) and 2 on internal errors. Diagnostics go to stderr
as ``file:line:col: severity: message``. Nothing is written to the output
directory unless the whole run succeeds.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__, model
from .aspects import describe_target, weave
from .backends.antlr import AntlrGenConfig, generate
from .backends.builders import BuilderGenConfig, generate_builders
from .errors import Diagnostic, GrammaticError
from .metadata import AnnotationStore, format_value
from .query import match
from .syntax import parse_aspect, parse_grammar, parse_query, print_grammar
from .templates import FileLoader, resolve


class InputError(Exception):
    """A problem with the command line or an input file outside the parsers."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="grammatic", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def command(name, help, aspects=True):
        sp = sub.add_parser(name, help=help)
        sp.add_argument("grammar", help="grammar file (.gr)")
        sp.add_argument("--include", action="append", default=[], metavar="DIR",
                        help="directory searched for imported units (repeatable)")
        if aspects:
            sp.add_argument("--aspect", action="append", default=[], metavar="FILE",
                            help="aspect file, applied in command-line order (repeatable)")
        return sp

    command("check", "parse and resolve, print symbol and production counts", aspects=False)
    command("resolve", "print the flattened grammar in canonical form", aspects=False)
    q = command("query", "print the bindings of a query")
    q.add_argument("-e", dest="expression", required=True, metavar="QUERY")
    q.add_argument("--format", choices=("text", "json"), default="text")
    w = command("weave", "apply aspects and print the attachments")
    w.add_argument("aspects", nargs="*", metavar="ASPECT", help="more aspect files")
    w.add_argument("--format", choices=("text", "json"), default="text")
    for name, what in (("gen-antlr", "an ANTLR grammar with embedded actions"),
                       ("gen-builders", "an ANTLR grammar plus builder interfaces")):
        g = command(name, f"generate {what}")
        g.add_argument("-o", dest="output", required=True, metavar="DIR")
        g.add_argument("--grammar-name", metavar="ID")
    return p


def read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise InputError(f"{path}: error: cannot read file: {e.strerror}") from None
    except UnicodeDecodeError:
        raise InputError(f"{path}: error: file is not valid UTF-8") from None


def load_grammar(args) -> model.Grammar:
    unit = parse_grammar(read(args.grammar), args.grammar)
    return resolve(unit, FileLoader(args.include))


def load_store(args, grammar, warnings: list) -> tuple[AnnotationStore, object]:
    files = list(getattr(args, "aspect", [])) + list(getattr(args, "aspects", []))
    aspects = [parse_aspect(read(f), f) for f in files]
    store, report = weave(grammar, aspects, AnnotationStore(grammar))
    warnings.extend(report.warnings)
    return store, report


def location(node) -> str:
    span = getattr(node, "span", None)
    return str(span) if span is not None else "?"


def node_json(node) -> dict:
    out = {"kind": model.kind_of(node), "location": location(node)}
    if isinstance(node, (model.Symbol, model.SymbolRef)):
        out["name"] = node.name
    elif isinstance(node, model.StringLiteral):
        out["text"] = node.text
    else:
        from .syntax.printer import print_expr
        if isinstance(node, model.Production):
            out["text"] = print_expr(node.body)
        elif not isinstance(node, model.Grammar):
            out["text"] = print_expr(node)
    return out


def cmd_check(args, out, warnings):
    g = load_grammar(args)
    n = sum(len(s.productions) for s in g.symbols)
    out.append(f"{len(g.symbols)} symbols, {n} productions\n")


def cmd_resolve(args, out, warnings):
    out.append(print_grammar(load_grammar(args)))


def cmd_query(args, out, warnings):
    g = load_grammar(args)
    store, _ = load_store(args, g, warnings)
    pattern = parse_query(args.expression, "<query>")
    names = pattern.variables()
    bindings = match(g, store, pattern)
    if args.format == "json":
        report = {"bindings": [
            {"symbol": b.symbol.name,
             "variables": {v: [node_json(n) for n in b.variables[v]]
                           for v in names if v in b.variables}}
            for b in bindings]}
        out.append(json.dumps(report, indent=2, sort_keys=True) + "\n")
        return
    for b in bindings:
        items = [f"{v}={model.kind_of(b.variables[v][0])}:{location(b.variables[v][0])}"
                 for v in names if b.variables.get(v)]
        out.append(" ".join(items) + "\n")


def cmd_weave(args, out, warnings):
    g = load_grammar(args)
    store, report = load_store(args, g, warnings)
    if args.format == "json":
        data = {
            "rules": [{"origin": r.origin, "location": str(r.span) if r.span else None,
                       "matches": r.matches, "attachments": r.attachments}
                      for r in report.rules],
            "attachments": [{"target": node_json(store.node(a.node)), "name": a.name,
                             "value": format_value(a.value),
                             "origin": str(a.origin) if a.origin else None}
                            for a in report.attachments],
            "warnings": [str(w) for w in report.warnings],
        }
        out.append(json.dumps(data, indent=2, sort_keys=True) + "\n")
        return
    for a in report.attachments:
        node = store.node(a.node)
        out.append(f"{location(node)}: {describe_target(node)}: "
                   f"{a.name} = {format_value(a.value)}\n")
    n, r = len(report.attachments), len(report.rules)
    out.append(f"{n} attribute{'s' * (n != 1)} from {r} rule{'s' * (r != 1)}\n")


def cmd_gen_antlr(args, out, warnings):
    g = load_grammar(args)
    store, _ = load_store(args, g, warnings)
    diags: list[Diagnostic] = []
    config = AntlrGenConfig(grammar_name=args.grammar_name)
    text = generate(g, store, config, diags)
    warnings.extend(diags)
    name = text.split("\n", 1)[0].split()[1].rstrip(";")
    return {f"{name}.g": text}


def cmd_gen_builders(args, out, warnings):
    g = load_grammar(args)
    store, _ = load_store(args, g, warnings)
    diags: list[Diagnostic] = []
    text, interfaces = generate_builders(g, store, BuilderGenConfig(args.grammar_name), diags)
    warnings.extend(diags)
    name = text.split("\n", 1)[0].split()[1].rstrip(";")
    files = {f"{name}.g": text}
    files.update((f"{iface}.java", src) for iface, src in interfaces)
    return files


COMMANDS = {
    "check": cmd_check, "resolve": cmd_resolve, "query": cmd_query, "weave": cmd_weave,
    "gen-antlr": cmd_gen_antlr, "gen-builders": cmd_gen_builders,
}


def write_outputs(directory: str, files: dict[str, str]) -> list[Path]:
    root = Path(directory)
    root.mkdir(parents=True, exist_ok=True)
    written = []
    for name, text in files.items():
        path = root / name
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        written.append(path)
    return written


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    out: list[str] = []
    warnings: list[Diagnostic] = []
    try:
        files = COMMANDS[args.command](args, out, warnings)
    except GrammaticError as e:
        for w in warnings:
            print(w, file=sys.stderr)
        print(e.diagnostic(), file=sys.stderr)
        return 1
    except InputError as e:
        print(e, file=sys.stderr)
        return 1
    except Exception as e:  # anything else is a bug, not bad input
        print(f"grammatic: internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2
    for w in warnings:
        print(w, file=sys.stderr)
    if files:
        try:
            for path in write_outputs(args.output, files):
                out.append(f"wrote {path}\n")
        except OSError as e:
            print(f"{args.output}: error: cannot write output: {e.strerror}", file=sys.stderr)
            return 1
    sys.stdout.write("".join(out))
    return 0


if __name__ == "__main__":
    sys.exit(main())
