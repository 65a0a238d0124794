"""Canonical pretty-printer for grammar units.

Output always uses ``:`` as the rule separator and re-parses to a
structurally equal unit.
"""

from __future__ import annotations

from ..metadata import quote
from ..model import (ITERATION_SUFFIX, Alternative, CharClass, Grammar, Iteration,
                     Placeholder, Production, Sequence, StringLiteral, Symbol, SymbolRef,
                     TemplateCall)
from ..templates import PRODUCTIONS, ParsedUnit, TemplateDef

# contexts, from loosest to tightest binding
_TOP, _ALT_ITEM, _SEQ_ITEM, _POSTFIX = range(4)


def print_expr(expr, ctx: int = _TOP) -> str:
    if isinstance(expr, Alternative):
        text = " | ".join(print_expr(c, _ALT_ITEM) for c in expr.children)
        return f"({text})" if ctx > _TOP else text
    if isinstance(expr, Sequence):
        if not expr.children:
            return "" if ctx == _TOP else "()"
        text = " ".join(print_expr(c, _SEQ_ITEM) for c in expr.children)
        if len(expr.children) == 1 or ctx >= _SEQ_ITEM:
            return f"({text})"
        return text
    if isinstance(expr, Iteration):
        return print_expr(expr.child, _POSTFIX) + ITERATION_SUFFIX[expr.kind]
    if isinstance(expr, SymbolRef):
        return expr.name
    if isinstance(expr, StringLiteral):
        return quote(expr.text)
    if isinstance(expr, CharClass):
        return print_char_class(expr.items)
    if isinstance(expr, Placeholder):
        return "$" + expr.name
    if isinstance(expr, TemplateCall):
        return f"{expr.template}<{_print_args(expr.args)}>"
    raise TypeError(f"cannot print {type(expr).__name__}")


def print_char_class(items) -> str:
    parts = [quote(lo) if hi is None else f"{quote(lo)}--{quote(hi)}" for lo, hi in items]
    return "[" + " ".join(parts) + "]"


def _print_args(args) -> str:
    return ", ".join(" || ".join(print_expr(p) or "()" for p in arg) for arg in args)


def _print_productions(prods, indent: str) -> str:
    bodies = [print_expr(p.body if isinstance(p, Production) else p) for p in prods]
    if len(bodies) == 1:
        return bodies[0]
    return f"\n{indent}|| ".join(bodies) + f"\n{indent}"


def print_rule(rule: Symbol, indent: str = "") -> str:
    body = _print_productions(rule.productions, indent + "    ")
    sep = " " if body else ""
    if len(rule.productions) > 1:
        return f"{indent}{rule.name} : {body};"
    return f"{indent}{rule.name} :{sep}{body} ;"


def print_template(tpl: TemplateDef) -> str:
    params = ", ".join(
        f"{'Production*' if p.kind == PRODUCTIONS else p.kind} ${p.name}" for p in tpl.params)
    head = f"{tpl.result_kind} {tpl.name}<{params}> {{"
    if tpl.result_kind == "Symbol":
        lines = [print_rule(r, "    ") for r in tpl.body]
    else:
        lines = ["    " + _print_productions(tpl.body, "    ").rstrip() + " ;"]
    return "\n".join([head, *lines, "}"])


def print_grammar(unit: ParsedUnit | Grammar) -> str:
    """Render a parsed unit (or a resolved grammar) in canonical form."""
    out = []
    if isinstance(unit, Grammar):
        rules = unit.symbols
    else:
        for imp in unit.imports:
            if imp.is_template:
                out.append(f"import {imp.name}<{_print_args(imp.args)}>;")
            else:
                out.append(f"import {imp.name};")
        out.extend(print_template(t) for t in unit.templates)
        rules = unit.rules
    out.extend(print_rule(r) for r in rules)
    return "\n".join(out) + ("\n" if out else "")
