"""Aspects: queries paired with metadata assignments.

An aspect file is a list of rules; each rule is a query whose positions may
carry ``[[ ... ]]`` blocks, optionally followed by a trailing block that
addresses query variables by name::

    #Rec --> #Rec ..;
    [[
        Rec { leftRecursive; };
    ]];

:func:`apply` runs every rule against a grammar and attaches the assigned
attributes to the matched nodes in an :class:`AnnotationStore`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import model
from .errors import AspectError, Diagnostic, MetadataError, SourceSpan
from .metadata import AnnotationStore, Value, format_value
from .query import (GRAMMAR, VARIABLE, Assignment, Binding, Block, QueryPattern,
                    iter_pattern, match)


@dataclass(frozen=True)
class AspectRule:
    pattern: QueryPattern
    trailing: Block | None = None
    span: SourceSpan | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Aspect:
    rules: tuple[AspectRule, ...]
    origin: str = "<string>"


@dataclass
class RuleReport:
    origin: str
    span: SourceSpan | None
    matches: int = 0
    attachments: int = 0


@dataclass
class WeaveReport:
    rules: list[RuleReport] = field(default_factory=list)
    attachments: list = field(default_factory=list)
    warnings: list[Diagnostic] = field(default_factory=list)

    def extend(self, other: WeaveReport) -> None:
        self.rules.extend(other.rules)
        self.attachments.extend(other.attachments)
        self.warnings.extend(other.warnings)


class _RuleWeaver:
    """Collects the attachments of one rule before committing them."""

    def __init__(self, grammar, rule: AspectRule, report: WeaveReport):
        self.grammar = grammar
        self.rule = rule
        self.report = report
        self.planned: dict[tuple, tuple[Value, SourceSpan | None]] = {}
        self.order: list[tuple] = []

    def plan(self, node, name: str, value: Value, span) -> None:
        key = (node.id, name)
        if key in self.planned:
            if self.planned[key][0] != value:
                raise AspectError(
                    f"rule assigns conflicting values to {name!r}: "
                    f"{format_value(self.planned[key][0])!r} and {format_value(value)!r}", span)
            return
        self.planned[key] = (value, span)
        self.order.append(key)

    def occurrences(self, name: str, anchor, binding: Binding | None) -> tuple:
        if binding is not None and name in binding.variables:
            return binding.variables[name]
        return tuple(model.references(anchor) if not isinstance(anchor, model.Grammar)
                     else (r for s in anchor.symbols for r in model.references(s)))

    def run_block(self, block: Block | None, anchors, binding: Binding | None) -> None:
        if block is None:
            return
        for anchor in anchors:
            self.run_assignments(block.assignments, anchor, binding)
        for entry in block.entries:
            targets = binding.variables.get(entry.variable, ()) if binding else ()
            for target in targets:
                self.run_assignments(entry.assignments, target, binding)

    def run_assignments(self, assignments, anchor, binding) -> None:
        for a in assignments:
            if a.occurrence is None:
                self.plan(anchor, a.name, a.value, a.span)
                continue
            targets = self.occurrences(a.occurrence, anchor, binding)
            if not targets:
                self.report.warnings.append(Diagnostic(
                    f"no occurrence of {a.occurrence!r} for attribute {a.name!r}", a.span))
            for t in targets:
                self.plan(t, a.name, a.value, a.span)

    def weave(self, binding: Binding) -> None:
        pattern = self.rule.pattern
        self.run_block(pattern.symbol_block, (binding.symbol,), binding)
        single = len(pattern.productions) == 1
        for i, pp in enumerate(pattern.productions):
            prod = binding.productions[0 if single else i]
            self.run_block(pp.block, (prod,), binding)
            for p in iter_pattern(pp.body):
                if p.block is not None:
                    self.run_block(p.block, binding.positions.get(p.pos, ()), binding)
        if self.rule.trailing is not None:
            trailing = self.rule.trailing
            for a in trailing.assignments:
                self.run_assignments((a,), binding.symbol, binding)
            self.run_block(Block((), trailing.entries), (), binding)


def apply(grammar: model.Grammar, aspect: Aspect,
          store: AnnotationStore | None = None) -> tuple[AnnotationStore, WeaveReport]:
    """Weave ``aspect`` onto ``grammar``.

    Returns a new store (the input store is left untouched) and a report
    with per-rule match counts. Attaching an attribute that is already
    present raises, naming both origins; rules that match nothing only warn.
    """
    store = AnnotationStore(grammar) if store is None else store.copy()
    if store.grammar is not grammar:
        raise AspectError("annotation store belongs to a different grammar")
    report = WeaveReport()
    for rule in aspect.rules:
        rr = RuleReport(aspect.origin, rule.span)
        report.rules.append(rr)
        weaver = _RuleWeaver(grammar, rule, report)
        if rule.pattern.symbol_kind == GRAMMAR:
            rr.matches = 1
            weaver.run_block(rule.pattern.symbol_block, (grammar,), None)
        else:
            bindings = match(grammar, store, rule.pattern)
            rr.matches = len(bindings)
            if not bindings:
                report.warnings.append(Diagnostic("aspect rule matched nothing", rule.span))
            for b in bindings:
                weaver.weave(b)
        for key in weaver.order:
            value, span = weaver.planned[key]
            try:
                store.attach(key[0], key[1], value, span)
            except MetadataError as e:
                raise AspectError(e.message, e.span) from None
            report.attachments.append(store.attachment(*key))
            rr.attachments += 1
    return store, report


def weave(grammar: model.Grammar, aspects, store: AnnotationStore | None = None):
    """Apply several aspects in order; returns the final store and a merged report."""
    store = AnnotationStore(grammar) if store is None else store
    total = WeaveReport()
    for aspect in aspects:
        store, report = apply(grammar, aspect, store)
        total.extend(report)
    return store, total


def describe_target(node) -> str:
    kind = model.kind_of(node)
    if isinstance(node, (model.Symbol, model.SymbolRef)):
        return f"{kind} {node.name}"
    if isinstance(node, model.StringLiteral):
        return f"{kind} {node.text!r}"
    return kind
