"""ANTLR 3 grammar generation from an annotated grammar.

Recognized attributes:

=============  ==========================  ====================================
node           attribute                   value
=============  ==========================  ====================================
symbol         ``returns``                 ID (or STRING) - result type
symbol         ``params``                  SEQUENCE of TUPLE(type; name)
production     ``predicate``               STRING - syntactic predicate
production     ``before`` / ``after``      STRING - actions around the body
expression     ``after``                   STRING - action after the expression
rule call      ``arguments``               SEQUENCE of ID
grammar        ``antlrName``, ``antlrHeader``
=============  ==========================  ====================================

Inside actions ``##result`` is the rule's result variable and ``#name``
refers to the value of an occurrence of ``name`` in scope (the annotated
node's subtree).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from .. import model
from ..errors import Diagnostic, GenerationError
from ..metadata import AnnotationStore, Id, Int, Punct, Seq, Str, Tuple, quote
from ..model import (ITERATION_SUFFIX, Alternative, CharClass, Iteration, Production, Sequence,
                     StringLiteral, Symbol, SymbolRef)

RESULT_VAR = "result"

SYMBOL_ATTRS = frozenset({"returns", "params"})
PRODUCTION_ATTRS = frozenset({"predicate", "before", "after"})
EXPRESSION_ATTRS = frozenset({"after"})
CALL_ATTRS = frozenset({"arguments", "after"})
GRAMMAR_ATTRS = frozenset({"antlrName", "antlrHeader"})

_TOP, _ALT_ITEM, _SEQ_ITEM, _POSTFIX = range(4)
_ACTION_REF = re.compile(r"##([A-Za-z_][A-Za-z0-9_]*)|#([A-Za-z_][A-Za-z0-9_]*)")


@dataclass(frozen=True)
class AntlrGenConfig:
    grammar_name: str | None = None
    header_action: str | None = None
    occurrence_naming: str = "symbol-index"


def substitute_action(body: str, scope: dict[str, str], result_var: str | None = RESULT_VAR,
                      span=None) -> str:
    """Replace ``##result`` and ``#name`` in an action body.

    Purely textual: string literals inside the action are not special.

    >>> substitute_action("##result += #mult;", {"mult": "m0"}, "result")
    'result += m0;'
    """
    def repl(m):
        if m.group(1) is not None:
            if m.group(1) == "result" and result_var:
                return result_var
            if m.group(1) == "result":
                raise GenerationError("##result used in a rule without a return value", span)
            raise GenerationError(f"unknown rule variable ##{m.group(1)}", span)
        name = m.group(2)
        if name not in scope:
            raise GenerationError(f"unresolved reference #{name} in action", span)
        return scope[name]

    return _ACTION_REF.sub(repl, body)


def action_refs(body: str) -> list[str]:
    return [m.group(2) for m in _ACTION_REF.finditer(body) if m.group(2) is not None]


def antlr_char_class(items) -> str:
    parts = [quote(lo) if hi is None else f"{quote(lo)}..{quote(hi)}" for lo, hi in items]
    return parts[0] if len(parts) == 1 else "(" + " | ".join(parts) + ")"


def lexer_names(grammar: model.Grammar, lexical: frozenset[str]) -> dict[str, str]:
    """ANTLR rule name for each symbol: lexical symbols get an uppercase initial."""
    names = {}
    taken = {}
    for s in grammar.symbols:
        name = s.name[0].upper() + s.name[1:] if s.name in lexical else s.name
        if name in taken:
            raise GenerationError(
                f"symbols {taken[name]!r} and {s.name!r} both map to ANTLR rule {name!r}", s.span)
        taken[name] = s.name
        names[s.name] = name
    return names


def fragment_symbols(grammar: model.Grammar, lexical: frozenset[str]) -> frozenset[str]:
    """Lexical symbols referenced only from other lexical symbols."""
    from_parser, from_lexer = set(), set()
    for s in grammar.symbols:
        target = from_lexer if s.name in lexical else from_parser
        for p in s.productions:
            target.update(r.name for r in model.references(p))
    return frozenset(n for n in lexical if n in from_lexer and n not in from_parser)


def default_grammar_name(grammar: model.Grammar) -> str:
    if grammar.origin.startswith("<"):
        return "Grammar"
    stem = re.sub(r"[^A-Za-z0-9_]", "_", Path(grammar.origin).stem) or "Grammar"
    if not stem[0].isalpha():
        stem = "G" + stem
    return stem[0].upper() + stem[1:]


def _text_of(value, what, span) -> str:
    if isinstance(value, Str):
        return value.text
    raise GenerationError(f"attribute {what!r} must be a STRING, got {value.kind}", span)


class AntlrWriter:
    def __init__(self, grammar: model.Grammar, store: AnnotationStore | None,
                 config: AntlrGenConfig | None = None, diagnostics: list | None = None):
        self.grammar = grammar
        self.store = store if store is not None else AnnotationStore(grammar)
        self.config = config or AntlrGenConfig()
        self.diagnostics = diagnostics if diagnostics is not None else []
        self.lexical = model.lexical_symbols(grammar)
        self.names = lexer_names(grammar, self.lexical)
        self.fragments = fragment_symbols(grammar, self.lexical)

    # -- attribute access ----------------------------------------------------------

    def attr(self, node, name):
        return self.store.lookup(node.id, name)

    def origin(self, node, name):
        att = self.store.attachment(node.id, name)
        return att.origin if att is not None else getattr(node, "span", None)

    def check_attributes(self) -> None:
        for att in self.store:
            node = self.store.node(att.node)
            if isinstance(node, model.Grammar):
                allowed = GRAMMAR_ATTRS
            elif isinstance(node, Symbol):
                allowed = SYMBOL_ATTRS
            elif isinstance(node, Production):
                allowed = PRODUCTION_ATTRS
            elif isinstance(node, SymbolRef):
                allowed = CALL_ATTRS
            else:
                allowed = EXPRESSION_ATTRS
            if att.name in allowed:
                continue
            if att.name == "predicate":
                raise GenerationError(
                    f"predicate is only supported on productions, not on {model.kind_of(node)}",
                    att.origin)
            self.diagnostics.append(Diagnostic(
                f"attribute {att.name!r} on {model.kind_of(node)} is not used by the ANTLR "
                "generator", att.origin))

    # -- header ------------------------------------------------------------------------

    def grammar_name(self) -> str:
        name = self.config.grammar_name
        if name is None:
            v = self.attr(self.grammar, "antlrName")
            if isinstance(v, (Id, Str)):
                name = v.name if isinstance(v, Id) else v.text
            elif v is not None:
                raise GenerationError("antlrName must be an ID or STRING",
                                      self.origin(self.grammar, "antlrName"))
        name = name or default_grammar_name(self.grammar)
        if not re.fullmatch(r"[A-Za-z][A-Za-z0-9_]*", name):
            raise GenerationError(f"{name!r} is not a valid ANTLR grammar name")
        return name

    def header(self) -> str | None:
        if self.config.header_action is not None:
            return self.config.header_action
        v = self.attr(self.grammar, "antlrHeader")
        if v is None:
            return None
        return _text_of(v, "antlrHeader", self.origin(self.grammar, "antlrHeader"))

    # -- rules -------------------------------------------------------------------------

    def rule_head(self, symbol: Symbol) -> tuple[str, str | None]:
        name = self.names[symbol.name]
        params = self.attr(symbol, "params")
        returns = self.attr(symbol, "returns")
        lexical = symbol.name in self.lexical
        if lexical and (params is not None or returns is not None):
            raise GenerationError(
                f"lexer rule {name} cannot take params or return values",
                self.origin(symbol, "returns" if returns is not None else "params"))
        head = name
        if params is not None:
            head += "[" + ", ".join(f"{t} {n}" for t, n in
                                    self.param_list(params, self.origin(symbol, "params"))) + "]"
        result_var = None
        if returns is not None:
            if isinstance(returns, Id):
                rtype = returns.name
            elif isinstance(returns, Str):
                rtype = returns.text
            else:
                raise GenerationError(f"attribute 'returns' must be an ID, got {returns.kind}",
                                      self.origin(symbol, "returns"))
            head += f" returns [{rtype} {RESULT_VAR}]"
            result_var = RESULT_VAR
        if symbol.name in self.fragments:
            head = "fragment " + head
        return head, result_var

    @staticmethod
    def param_list(value, span) -> list[tuple[str, str]]:
        if not isinstance(value, Seq):
            raise GenerationError("attribute 'params' must be a SEQUENCE of TUPLE(type; name)",
                                  span)
        out = []
        for e in value.elements:
            if isinstance(e, Punct) and e.char in ",;":
                continue
            if not (isinstance(e, Tuple) and set(e.keys()) == {"type", "name"}):
                raise GenerationError("each parameter must be a TUPLE(type; name)", span)
            t, n = e.get("type"), e.get("name")
            if not isinstance(n, Id) or not isinstance(t, (Id, Str)):
                raise GenerationError("parameter type and name must be identifiers", span)
            out.append((t.name if isinstance(t, Id) else t.text, n.name))
        return out

    def arguments(self, ref: SymbolRef) -> list[str] | None:
        value = self.attr(ref, "arguments")
        if value is None:
            return None
        span = self.origin(ref, "arguments")
        if not isinstance(value, Seq):
            raise GenerationError("attribute 'arguments' must be a SEQUENCE of ID", span)
        args = []
        for e in value.elements:
            if isinstance(e, Punct) and e.char == ",":
                continue
            if isinstance(e, Id):
                args.append(e.name)
            elif isinstance(e, Int):
                args.append(str(e.value))
            else:
                raise GenerationError("attribute 'arguments' must be a SEQUENCE of ID", span)
        return args

    def symbol(self, symbol: Symbol) -> str:
        head, result_var = self.rule_head(symbol)
        alts = [_ProductionWriter(self, p, result_var).render() for p in symbol.productions]
        lines = [head]
        for i, a in enumerate(alts):
            lines.append(f"    {':' if i == 0 else '|'} {a}".rstrip())
        lines.append("    ;")
        return "\n".join(lines)

    def generate(self) -> str:
        self.check_attributes()
        out = [f"grammar {self.grammar_name()};", ""]
        header = self.header()
        if header is not None:
            out += ["@header {", header.strip("\n"), "}", ""]
        for s in self.grammar.symbols:
            out.append(self.symbol(s))
            out.append("")
        return "\n".join(out)


class _ProductionWriter:
    """Renders one production, allocating occurrence labels on demand."""

    def __init__(self, writer: AntlrWriter, production: Production, result_var: str | None):
        self.w = writer
        self.production = production
        self.result_var = result_var
        self.labels: dict[model.NodeId, str] = {}
        counts: dict[str, int] = {}
        for ref in model.references(production):
            k = counts.get(ref.name, 0)
            counts[ref.name] = k + 1
            self.labels[ref.id] = f"{ref.name}{k}"
        self.used: set[model.NodeId] = set()

    def action(self, node, name) -> str | None:
        value = self.w.attr(node, name)
        if value is None:
            return None
        span = self.w.origin(node, name)
        body = _text_of(value, name, span)
        scope = {}
        for ref_name in action_refs(body):
            hits = [r for r in model.references(node) if r.name == ref_name]
            if not hits:
                continue  # substitute_action reports it
            if len(hits) > 1:
                raise GenerationError(
                    f"#{ref_name} is ambiguous here: {len(hits)} occurrences in scope", span)
            self.used.add(hits[0].id)
            scope[ref_name] = self.labels[hits[0].id]
        return substitute_action(body, scope, self.result_var, span).strip()

    def render(self) -> str:
        p = self.production
        before = self.action(p, "before")
        after = self.action(p, "after")
        pred = self.w.attr(p, "predicate")
        # actions are resolved first so that labels are known before the body is printed
        body = self.expr(p.body, _ALT_ITEM)
        parts = []
        if pred is not None:
            parts.append(f"({_text_of(pred, 'predicate', self.w.origin(p, 'predicate')).strip()})=>")
        if before:
            parts.append("{" + before + "}")
        if body:
            parts.append(body)
        if after:
            parts.append("{" + after + "}")
        return " ".join(parts)

    def expr(self, node, ctx: int) -> str:
        after = self.action(node, "after")
        text = self.core(node, _SEQ_ITEM if after and ctx < _SEQ_ITEM else ctx)
        if after:
            text = f"{text} {{{after}}}"
            if ctx >= _POSTFIX:
                text = f"({text})"
        return text

    def core(self, node, ctx: int) -> str:
        if isinstance(node, SymbolRef):
            text = self.w.names[node.name]
            args = self.w.arguments(node)
            if args:
                text += "[" + ", ".join(args) + "]"
            # labels may be requested by an action attached to this very node
            if node.id in self.used:
                text = f"{self.labels[node.id]}={text}"
            return text
        if isinstance(node, StringLiteral):
            return quote(node.text)
        if isinstance(node, CharClass):
            return antlr_char_class(node.items)
        if isinstance(node, Iteration):
            return self.expr(node.child, _POSTFIX) + ITERATION_SUFFIX[node.kind]
        if isinstance(node, Sequence):
            if not node.children:
                return "" if ctx <= _ALT_ITEM else "()"
            text = " ".join(t for t in (self.expr(c, _SEQ_ITEM) for c in node.children) if t)
            return f"({text})" if ctx >= _SEQ_ITEM and len(node.children) > 1 else text
        if isinstance(node, Alternative):
            text = " | ".join(self.expr(c, _ALT_ITEM) for c in node.children)
            return f"({text})" if ctx > _TOP else text
        raise GenerationError(f"cannot generate ANTLR for {model.kind_of(node)}",
                              getattr(node, "span", None))


def generate(grammar: model.Grammar, store: AnnotationStore | None = None,
             config: AntlrGenConfig | None = None, diagnostics: list | None = None) -> str:
    """Render ``grammar`` plus its annotations as an ANTLR 3 combined grammar.

    Unknown attributes are skipped; a :class:`Diagnostic` for each is
    appended to ``diagnostics`` when given.
    """
    return AntlrWriter(grammar, store, config, diagnostics).generate()
