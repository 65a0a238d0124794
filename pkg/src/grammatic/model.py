"""Immutable grammar object model.

Every node carries a :class:`NodeId` that is excluded from equality, so
``a == b`` on two nodes is structural equality. Metadata never lives on the
nodes themselves; it is attached from the outside by NodeId (see
:mod:`grammatic.metadata`).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Union

from .errors import SourceSpan

_ids = itertools.count(1)


@dataclass(frozen=True, order=True)
class NodeId:
    value: int

    @classmethod
    def fresh(cls) -> NodeId:
        return cls(next(_ids))

    def __repr__(self):
        return f"#{self.value}"


def _id_field():
    return field(default_factory=NodeId.fresh, compare=False, repr=False, kw_only=True)


def _span_field():
    return field(default=None, compare=False, repr=False, kw_only=True)


# -- expressions -------------------------------------------------------------

@dataclass(frozen=True)
class Sequence:
    """Concatenation; zero children denotes the empty string."""

    children: tuple[Expression, ...] = ()
    id: NodeId = _id_field()
    span: SourceSpan | None = _span_field()


@dataclass(frozen=True)
class Alternative:
    children: tuple[Expression, ...]
    id: NodeId = _id_field()
    span: SourceSpan | None = _span_field()

    def __post_init__(self):
        if len(self.children) < 2:
            raise ValueError("Alternative needs at least two children")


STAR, PLUS, OPTION = "star", "plus", "option"
ITERATION_SUFFIX = {STAR: "*", PLUS: "+", OPTION: "?"}


@dataclass(frozen=True)
class Iteration:
    child: Expression
    kind: str
    id: NodeId = _id_field()
    span: SourceSpan | None = _span_field()

    def __post_init__(self):
        if self.kind not in ITERATION_SUFFIX:
            raise ValueError(f"bad iteration kind {self.kind!r}")


@dataclass(frozen=True)
class SymbolRef:
    name: str
    id: NodeId = _id_field()
    span: SourceSpan | None = _span_field()


@dataclass(frozen=True)
class StringLiteral:
    text: str
    id: NodeId = _id_field()
    span: SourceSpan | None = _span_field()

    def __post_init__(self):
        if not self.text:
            raise ValueError("empty string literal")


@dataclass(frozen=True)
class CharClass:
    """A set of characters; each item is ``(char, None)`` or ``(low, high)``."""

    items: tuple[tuple[str, str | None], ...]
    id: NodeId = _id_field()
    span: SourceSpan | None = _span_field()

    def __post_init__(self):
        if not self.items:
            raise ValueError("empty character class")
        for lo, hi in self.items:
            if len(lo) != 1 or (hi is not None and len(hi) != 1):
                raise ValueError("character class items must be single characters")
            if hi is not None and lo > hi:
                raise ValueError(f"character range {lo!r}--{hi!r} is reversed")


@dataclass(frozen=True)
class Placeholder:
    """A ``$name`` hole inside a template body."""

    name: str
    id: NodeId = _id_field()
    span: SourceSpan | None = _span_field()


@dataclass(frozen=True)
class TemplateCall:
    """Inline instantiation ``name<arg, ...>``; each arg is a list of productions."""

    template: str
    args: tuple[tuple[Expression, ...], ...]
    id: NodeId = _id_field()
    span: SourceSpan | None = _span_field()


Expression = Union[Sequence, Alternative, Iteration, SymbolRef, StringLiteral,
                   CharClass, Placeholder, TemplateCall]
ATOMS = (SymbolRef, StringLiteral, CharClass)


def seq(*items: Expression, span: SourceSpan | None = None) -> Expression:
    """Build a sequence, collapsing the one-element case to the element."""
    if len(items) == 1:
        return items[0]
    return Sequence(tuple(items), span=span)


def alt(*items: Expression, span: SourceSpan | None = None) -> Expression:
    if len(items) == 1:
        return items[0]
    return Alternative(tuple(items), span=span)


# -- rules -------------------------------------------------------------------

@dataclass(frozen=True)
class Production:
    body: Expression
    id: NodeId = _id_field()
    span: SourceSpan | None = _span_field()


@dataclass(frozen=True)
class Symbol:
    name: str
    productions: tuple[Production, ...]
    id: NodeId = _id_field()
    span: SourceSpan | None = _span_field()

    def __post_init__(self):
        if not self.productions:
            raise ValueError(f"symbol {self.name!r} has no productions")


@dataclass(frozen=True)
class Grammar:
    symbols: tuple[Symbol, ...]
    origin: str = "<grammar>"
    id: NodeId = _id_field()

    def __post_init__(self):
        seen = set()
        for s in self.symbols:
            if s.name in seen:
                raise ValueError(f"duplicate symbol {s.name!r}")
            seen.add(s.name)

    def lookup(self, name: str) -> Symbol | None:
        return lookup(self, name)

    def __iter__(self):
        return iter(self.symbols)


def structural_equals(a, b) -> bool:
    """True iff two nodes are identical up to NodeIds and spans."""
    return a == b


def children(node) -> tuple:
    if isinstance(node, Grammar):
        return node.symbols
    if isinstance(node, Symbol):
        return node.productions
    if isinstance(node, Production):
        return (node.body,)
    if isinstance(node, (Sequence, Alternative)):
        return node.children
    if isinstance(node, Iteration):
        return (node.child,)
    if isinstance(node, TemplateCall):
        return tuple(e for arg in node.args for e in arg)
    return ()


_KINDS = {
    Grammar: "grammar", Symbol: "symbol", Production: "production",
    Sequence: "sequence", Alternative: "alternative", Iteration: "iteration",
    SymbolRef: "ref", StringLiteral: "literal", CharClass: "charclass",
    Placeholder: "placeholder", TemplateCall: "template-call",
}


def kind_of(node) -> str:
    return _KINDS[type(node)]


class WalkItem(NamedTuple):
    id: NodeId
    kind: str
    parent: NodeId
    node: object


def walk(grammar: Grammar) -> Iterator[WalkItem]:
    """Pre-order traversal; symbols in declaration order, parents first."""
    stack = [(s, grammar.id) for s in reversed(grammar.symbols)]
    while stack:
        node, parent = stack.pop()
        yield WalkItem(node.id, kind_of(node), parent, node)
        stack.extend((c, node.id) for c in reversed(children(node)))


def iter_subtree(node) -> Iterator:
    """Pre-order nodes of ``node`` including itself."""
    stack = [node]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(reversed(children(n)))


def lookup(grammar: Grammar, name: str) -> Symbol | None:
    for s in grammar.symbols:
        if s.name == name:
            return s
    return None


def references(node) -> Iterator[SymbolRef]:
    for n in iter_subtree(node):
        if isinstance(n, SymbolRef):
            yield n


def _is_lexical_expr(expr, lexical_names) -> bool:
    for n in iter_subtree(expr):
        if isinstance(n, SymbolRef) and n.name not in lexical_names:
            return False
        if isinstance(n, (Placeholder, TemplateCall)):
            return False
    return True


def _has_lexical_content(symbol: Symbol) -> bool:
    return any(isinstance(n, (StringLiteral, CharClass))
               for p in symbol.productions for n in iter_subtree(p))


def lexical_symbols(grammar: Grammar) -> frozenset[str]:
    """Names of the symbols that are "virtually terminal".

    A symbol is lexical when its productions are built only from literals,
    character classes, the regular operators and references to symbols
    already known to be lexical, and it contains at least one literal or
    character class itself (so a pure renaming rule like ``type : ID`` stays
    syntactic). This is a least fixpoint, so recursive symbols are never
    lexical.
    """
    found: set[str] = set()
    changed = True
    while changed:
        changed = False
        for s in grammar.symbols:
            if s.name not in found and _has_lexical_content(s) and all(
                    _is_lexical_expr(p.body, found) for p in s.productions):
                found.add(s.name)
                changed = True
    return frozenset(found)


def clone(node, **renames):
    """Deep copy with fresh NodeIds throughout (spans are kept)."""
    if isinstance(node, Sequence):
        return Sequence(tuple(clone(c) for c in node.children), span=node.span)
    if isinstance(node, Alternative):
        return Alternative(tuple(clone(c) for c in node.children), span=node.span)
    if isinstance(node, Iteration):
        return Iteration(clone(node.child), node.kind, span=node.span)
    if isinstance(node, SymbolRef):
        return SymbolRef(node.name, span=node.span)
    if isinstance(node, StringLiteral):
        return StringLiteral(node.text, span=node.span)
    if isinstance(node, CharClass):
        return CharClass(node.items, span=node.span)
    if isinstance(node, Placeholder):
        return Placeholder(node.name, span=node.span)
    if isinstance(node, TemplateCall):
        return TemplateCall(node.template,
                            tuple(tuple(clone(e) for e in a) for a in node.args),
                            span=node.span)
    if isinstance(node, Production):
        return Production(clone(node.body), span=node.span)
    if isinstance(node, Symbol):
        return Symbol(renames.get("name", node.name),
                      tuple(clone(p) for p in node.productions), span=node.span)
    if isinstance(node, Grammar):
        return Grammar(tuple(clone(s) for s in node.symbols), node.origin)
    raise TypeError(f"cannot clone {type(node).__name__}")
