"""Imports and template instantiation.

A template is a grammar fragment with typed ``$placeholders``::

    Symbol binaryOperation<ID $name, Expression $sign, Expression $argument> {
        $name --> $argument ($sign $argument)*;
    }

    import binaryOperation<Product, '*' | '/', Factor>;

:func:`resolve` flattens a root :class:`ParsedUnit` and everything it imports
into a single :class:`~grammatic.model.Grammar`.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Union

from . import model
from .errors import ResolveError, SourceSpan, TemplateError
from .model import (Alternative, Expression, Iteration, Placeholder, Production,
                    Sequence, Symbol, SymbolRef, TemplateCall)

ID, SYMBOL, EXPRESSION, PRODUCTION, PRODUCTIONS = (
    "ID", "Symbol", "Expression", "Production", "Production*")
PARAM_KINDS = (ID, SYMBOL, EXPRESSION, PRODUCTION, PRODUCTIONS)
RESULT_KINDS = (SYMBOL, EXPRESSION, PRODUCTION)
_NAME_KINDS = (ID, SYMBOL)


@dataclass(frozen=True)
class Param:
    kind: str
    name: str


@dataclass(frozen=True)
class TemplateDef:
    """``body`` holds rules for Symbol templates, else productions."""

    name: str
    result_kind: str
    params: tuple[Param, ...]
    body: tuple
    span: SourceSpan | None = field(default=None, compare=False, repr=False)

    def param(self, name: str) -> Param | None:
        for p in self.params:
            if p.name == name:
                return p
        return None


@dataclass(frozen=True)
class ImportDecl:
    """``import unit;`` (``template`` is None) or ``import tpl<args>;``.

    Each argument is the list of productions written for it; the template's
    parameter kinds decide how it is read.
    """

    name: str
    args: tuple[tuple[Expression, ...], ...] | None = None
    span: SourceSpan | None = field(default=None, compare=False, repr=False)

    @property
    def is_template(self) -> bool:
        return self.args is not None


@dataclass(frozen=True)
class ParsedUnit:
    imports: tuple[ImportDecl, ...] = ()
    templates: tuple[TemplateDef, ...] = ()
    rules: tuple[Symbol, ...] = ()
    origin: str = field(default="<string>", compare=False)

    def rule(self, name: str) -> Symbol | None:
        for r in self.rules:
            if r.name == name:
                return r
        return None


# -- template arguments -----------------------------------------------------------

@dataclass(frozen=True)
class TemplateArg:
    """A converted argument: ``value`` is a name, an Expression, or a tuple of Productions."""

    kind: str
    value: Union[str, Expression, tuple[Production, ...]]


def convert_arg(param: Param, productions: tuple[Expression, ...],
                span: SourceSpan | None = None) -> TemplateArg:
    """Read a raw argument (list of production bodies) as ``param.kind``."""
    if param.kind in _NAME_KINDS:
        if len(productions) != 1 or not isinstance(productions[0], SymbolRef):
            raise TemplateError(
                f"argument for {param.kind} ${param.name} must be a single name", span)
        return TemplateArg(param.kind, productions[0].name)
    if param.kind == EXPRESSION:
        if len(productions) != 1:
            raise TemplateError(
                f"argument for Expression ${param.name} must be one expression, "
                f"got {len(productions)} productions", span)
        return TemplateArg(param.kind, productions[0])
    if param.kind == PRODUCTION:
        if len(productions) != 1:
            raise TemplateError(f"argument for Production ${param.name} must be one production",
                                span)
        return TemplateArg(param.kind, (Production(productions[0]),))
    return TemplateArg(param.kind, tuple(Production(p) for p in productions))


# -- definition-time checks -----------------------------------------------------------

def check_template(tpl: TemplateDef) -> None:
    """Reject undeclared placeholders and placeholders used in the wrong role."""
    names = [p.name for p in tpl.params]
    if len(set(names)) != len(names):
        raise TemplateError(f"duplicate placeholder in template {tpl.name!r}", tpl.span)
    for p in tpl.params:
        if p.kind not in PARAM_KINDS:
            raise TemplateError(f"unknown placeholder kind {p.kind!r}", tpl.span)
    if tpl.result_kind not in RESULT_KINDS:
        raise TemplateError(f"unknown template kind {tpl.result_kind!r}", tpl.span)

    def need(name, allowed, where, span):
        param = tpl.param(name)
        if param is None:
            raise TemplateError(f"undeclared placeholder ${name} in template {tpl.name!r}", span)
        if param.kind not in allowed:
            raise TemplateError(
                f"{param.kind} placeholder ${name} cannot be used as {where}", span)

    def check_expr(expr, production_position):
        if isinstance(expr, Placeholder):
            allowed = (EXPRESSION, ID, SYMBOL)
            if production_position:
                allowed += (PRODUCTION, PRODUCTIONS)
            need(expr.name, allowed, "production" if production_position else "expression",
                 expr.span)
            return
        for child in model.children(expr):
            check_expr(child, False)

    if tpl.result_kind == SYMBOL:
        for rule in tpl.body:
            if rule.name.startswith("$"):
                need(rule.name[1:], _NAME_KINDS, "a rule name", rule.span)
            for prod in rule.productions:
                check_expr(prod.body, True)
    else:
        for prod in tpl.body:
            check_expr(prod.body, True)
        if tpl.result_kind == EXPRESSION and len(tpl.body) != 1:
            raise TemplateError(f"Expression template {tpl.name!r} must have one body", tpl.span)


# -- instantiation ----------------------------------------------------------------------

def _bind_args(tpl: TemplateDef, args, span) -> dict[str, TemplateArg]:
    if len(args) != len(tpl.params):
        raise TemplateError(
            f"template {tpl.name!r} takes {len(tpl.params)} arguments, got {len(args)}", span)
    bound = {}
    for param, arg in zip(tpl.params, args):
        if not isinstance(arg, TemplateArg):
            arg = convert_arg(param, tuple(arg), span)
        compatible = (arg.kind == param.kind
                      or {arg.kind, param.kind} <= set(_NAME_KINDS)
                      or {arg.kind, param.kind} == {PRODUCTION, PRODUCTIONS})
        if not compatible:
            raise TemplateError(
                f"argument for ${param.name} is {arg.kind}, expected {param.kind}", span)
        bound[param.name] = arg
    return bound


def _subst_expr(expr, bound):
    if isinstance(expr, Placeholder):
        arg = bound[expr.name]
        if arg.kind in _NAME_KINDS:
            return SymbolRef(arg.value, span=expr.span)
        if arg.kind == EXPRESSION:
            return model.clone(arg.value)
        raise TemplateError(f"production placeholder ${expr.name} used inside an expression",
                            expr.span)
    if isinstance(expr, Sequence):
        return Sequence(tuple(_subst_expr(c, bound) for c in expr.children), span=expr.span)
    if isinstance(expr, Alternative):
        return Alternative(tuple(_subst_expr(c, bound) for c in expr.children), span=expr.span)
    if isinstance(expr, Iteration):
        return Iteration(_subst_expr(expr.child, bound), expr.kind, span=expr.span)
    if isinstance(expr, TemplateCall):
        return TemplateCall(expr.template,
                            tuple(tuple(_subst_expr(e, bound) for e in a) for a in expr.args),
                            span=expr.span)
    return model.clone(expr)


def _subst_productions(prods, bound) -> list[Production]:
    out = []
    for prod in prods:
        body = prod.body
        if isinstance(body, Placeholder) and bound[body.name].kind in (PRODUCTION, PRODUCTIONS):
            out.extend(model.clone(p) for p in bound[body.name].value)
        else:
            out.append(Production(_subst_expr(body, bound), span=prod.span))
    return out


def instantiate(template: TemplateDef, args, span: SourceSpan | None = None):
    """Substitute ``args`` into ``template``.

    ``args`` holds :class:`TemplateArg` values or raw production lists as
    written at an import site. Symbol templates return a list of
    :class:`Symbol`; Expression and Production templates return a list of
    :class:`Production`. Every node in the result has a fresh NodeId.
    """
    check_template(template)
    bound = _bind_args(template, args, span)
    if template.result_kind != SYMBOL:
        return _subst_productions(template.body, bound)
    rules = []
    seen = {}
    for rule in template.body:
        name = rule.name
        if name.startswith("$"):
            name = bound[name[1:]].value
        if name in seen:
            raise TemplateError(
                f"instantiating {template.name!r} defines symbol {name!r} twice", span)
        seen[name] = True
        rules.append(Symbol(name, tuple(_subst_productions(rule.productions, bound)),
                            span=rule.span))
    return rules


# -- resolution ------------------------------------------------------------------------

Loader = Callable[[str, ParsedUnit], ParsedUnit]


class FileLoader:
    """Finds ``<name>.gr`` next to the importing file, then on the include path."""

    suffix = ".gr"

    def __init__(self, include: list[str | os.PathLike] = ()):
        self.include = [Path(p) for p in include]
        self._cache: dict[Path, ParsedUnit] = {}

    def candidates(self, name: str, importer: ParsedUnit) -> list[Path]:
        dirs = []
        origin = Path(importer.origin)
        if origin.parent and importer.origin not in ("<string>", ""):
            dirs.append(origin.parent)
        dirs.extend(self.include)
        return [d / (name + self.suffix) for d in dirs]

    def __call__(self, name: str, importer: ParsedUnit) -> ParsedUnit:
        from .syntax.parser import parse_grammar

        for path in self.candidates(name, importer):
            if path.is_file():
                key = path.resolve()
                if key not in self._cache:
                    self._cache[key] = parse_grammar(path.read_text(encoding="utf-8"), str(path))
                return self._cache[key]
        raise ResolveError(f"cannot find unit {name!r} (looked for {name}{self.suffix})")


def _as_loader(loader) -> Loader:
    if loader is None:
        def missing(name, importer):
            raise ResolveError(f"no loader configured to import {name!r}")
        return missing
    if isinstance(loader, Mapping):
        def from_mapping(name, importer):
            try:
                return loader[name]
            except KeyError:
                raise ResolveError(f"cannot find unit {name!r}") from None
        return from_mapping
    return loader


@dataclass
class _Rule:
    symbol: Symbol
    from_template: bool


class _Resolver:
    def __init__(self, loader: Loader):
        self.loader = loader
        self.templates: dict[str, TemplateDef] = {}
        self.done: dict[int, list[_Rule]] = {}
        self.stack: list[str] = []
        self.expanding: list[str] = []

    def unit_rules(self, unit: ParsedUnit, name: str) -> list[_Rule]:
        key = id(unit)
        if key in self.done:
            return []  # diamond import: rules already contributed once
        if name in self.stack:
            cycle = " -> ".join(self.stack + [name])
            raise ResolveError(f"import cycle: {cycle}")
        self.stack.append(name)
        for tpl in unit.templates:
            check_template(tpl)
            prev = self.templates.get(tpl.name)
            if prev is not None and prev != tpl:
                raise ResolveError(f"conflicting definitions of template {tpl.name!r}", tpl.span)
            self.templates[tpl.name] = tpl
        rules: list[_Rule] = []
        for imp in unit.imports:
            if imp.is_template:
                rules.extend(_Rule(s, True) for s in self.instantiate_import(imp))
            else:
                if imp.name in self.stack:
                    cycle = " -> ".join(self.stack + [imp.name])
                    raise ResolveError(f"import cycle: {cycle}", imp.span)
                try:
                    sub = self.loader(imp.name, unit)
                except ResolveError as e:
                    raise ResolveError(e.message, e.span or imp.span) from None
                rules.extend(self.unit_rules(sub, imp.name))
        rules.extend(_Rule(s, False) for s in unit.rules)
        self.stack.pop()
        self.done[key] = rules
        return rules

    def template(self, name, span) -> TemplateDef:
        tpl = self.templates.get(name)
        if tpl is None:
            raise ResolveError(f"unknown template {name!r}", span)
        return tpl

    def instantiate_import(self, imp: ImportDecl) -> list[Symbol]:
        tpl = self.template(imp.name, imp.span)
        if tpl.result_kind != SYMBOL:
            raise ResolveError(f"{tpl.result_kind} template {tpl.name!r} cannot be imported; "
                               "use it inline", imp.span)
        return instantiate(tpl, imp.args, imp.span)

    # inline template calls
    def expand_call(self, call: TemplateCall) -> list[Production]:
        tpl = self.template(call.template, call.span)
        if tpl.result_kind == SYMBOL:
            raise ResolveError(f"Symbol template {tpl.name!r} cannot be used inline", call.span)
        if call.template in self.expanding:
            raise ResolveError(f"recursive template instantiation of {call.template!r}",
                               call.span)
        self.expanding.append(call.template)
        prods = [Production(self.expand_expr(p.body), span=p.span)
                 for p in instantiate(tpl, call.args, call.span)]
        self.expanding.pop()
        return prods

    def expand_expr(self, expr):
        if isinstance(expr, TemplateCall):
            prods = self.expand_call(expr)
            if len(prods) != 1:
                raise ResolveError(f"template {expr.template!r} yields {len(prods)} productions "
                                   "where one expression is expected", expr.span)
            return prods[0].body
        if isinstance(expr, Placeholder):
            raise ResolveError(f"placeholder ${expr.name} outside a template", expr.span)
        if isinstance(expr, Sequence):
            return Sequence(tuple(self.expand_expr(c) for c in expr.children), span=expr.span)
        if isinstance(expr, Alternative):
            return Alternative(tuple(self.expand_expr(c) for c in expr.children), span=expr.span)
        if isinstance(expr, Iteration):
            return Iteration(self.expand_expr(expr.child), expr.kind, span=expr.span)
        return model.clone(expr)

    def expand_symbol(self, symbol: Symbol) -> list[Production]:
        out = []
        for prod in symbol.productions:
            if isinstance(prod.body, TemplateCall):
                out.extend(self.expand_call(prod.body))
            else:
                out.append(Production(self.expand_expr(prod.body), span=prod.span))
        return out


def resolve(root: ParsedUnit, loader=None) -> model.Grammar:
    """Flatten ``root`` and its imports into one Grammar.

    ``loader`` maps a unit name to a ParsedUnit: a callable
    ``(name, importing_unit)``, a mapping, or None when nothing is imported.
    Rules from imports come first, in import order. When a name is defined
    twice and at least one definition came from a template, productions are
    merged (earlier first); otherwise it is an error.
    """
    r = _Resolver(_as_loader(loader))
    # the root is named like an import so that a cycle back to it is caught
    root_name = root.origin if root.origin.startswith("<") else Path(root.origin).stem
    collected = r.unit_rules(root, root_name)
    merged: dict[str, tuple[list[Production], bool, Symbol]] = {}
    for item in collected:
        name = item.symbol.name
        prods = r.expand_symbol(item.symbol)
        if name not in merged:
            merged[name] = (prods, item.from_template, item.symbol)
            continue
        prev_prods, prev_tpl, prev_sym = merged[name]
        if not (prev_tpl or item.from_template):
            where = f" (first defined at {prev_sym.span})" if prev_sym.span else ""
            raise ResolveError(f"symbol {name!r} is defined twice{where}", item.symbol.span)
        merged[name] = (prev_prods + prods, True, prev_sym)
    if not merged:
        raise ResolveError("grammar defines no symbols",
                           SourceSpan.point(root.origin, 1, 1))
    symbols = tuple(Symbol(name, tuple(prods), span=sym.span)
                    for name, (prods, _, sym) in merged.items())
    grammar = model.Grammar(symbols, root.origin)
    check_references(grammar)
    return grammar


def check_references(grammar: model.Grammar) -> None:
    missing: dict[str, SourceSpan | None] = {}
    for item in model.walk(grammar):
        if item.kind == "ref" and grammar.lookup(item.node.name) is None:
            missing.setdefault(item.node.name, item.node.span)
    if missing:
        first = next(iter(missing.values()))
        raise ResolveError("unresolved symbol references: " + ", ".join(missing), first)
