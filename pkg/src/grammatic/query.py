"""Structural queries over grammars.

A query such as ``#Op --> #Arg (#Sign #Arg)* ;`` is parsed into a
:class:`QueryPattern` (see :func:`grammatic.syntax.parser.parse_query`) and
matched with :func:`match`, which returns every :class:`Binding`.

Matching rules, briefly:

* ``#X`` in expression position binds one atomic node (symbol reference,
  string literal or character class); repeated occurrences must be equal,
  and if ``#X`` is also the symbol variable the reference must name that
  symbol.
* ``..`` matches any run of sequence items (possibly empty), or any whole
  expression when it stands alone.
* ``$v:elem`` binds the node matched by ``elem``; ``$v:-->`` binds a production.
* A single production pattern is tried against each production of a symbol;
  a list of ``n > 1`` patterns must cover the symbol's ``n`` productions in order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Union

from . import model
from .errors import SourceSpan
from .metadata import AnnotationStore, AttributeCondition, Value, check_condition
from .model import (Alternative, CharClass, Iteration, Production, Sequence, StringLiteral,
                    Symbol, SymbolRef)

LITERAL, VARIABLE, ANONYMOUS, GRAMMAR = "literal", "variable", "anonymous", "grammar"


# -- annotation slots carried by patterns --------------------------------------

@dataclass(frozen=True)
class Assignment:
    """``name = value;`` or, with ``occurrence`` set, ``#occurrence.name = value;``."""

    name: str
    value: Value
    occurrence: str | None = None
    span: SourceSpan | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Entry:
    """``Var { assignments };`` inside a block, targeting a query variable."""

    variable: str
    assignments: tuple[Assignment, ...]
    span: SourceSpan | None = field(default=None, compare=False)


@dataclass(frozen=True)
class Block:
    assignments: tuple[Assignment, ...] = ()
    entries: tuple[Entry, ...] = ()
    span: SourceSpan | None = field(default=None, compare=False)


# -- expression patterns ----------------------------------------------------------

def _pfield(default=None):
    return field(default=default, compare=False, repr=False, kw_only=True)


@dataclass(frozen=True)
class PSeq:
    items: tuple[PExpr, ...]
    pos: int = _pfield(-1)
    block: Block | None = _pfield()
    span: SourceSpan | None = _pfield()


@dataclass(frozen=True)
class PAlt:
    items: tuple[PExpr, ...]
    pos: int = _pfield(-1)
    block: Block | None = _pfield()
    span: SourceSpan | None = _pfield()


@dataclass(frozen=True)
class PIter:
    child: PExpr
    kind: str
    pos: int = _pfield(-1)
    block: Block | None = _pfield()
    span: SourceSpan | None = _pfield()


@dataclass(frozen=True)
class PRef:
    name: str
    pos: int = _pfield(-1)
    block: Block | None = _pfield()
    span: SourceSpan | None = _pfield()


@dataclass(frozen=True)
class PLit:
    text: str
    pos: int = _pfield(-1)
    block: Block | None = _pfield()
    span: SourceSpan | None = _pfield()


@dataclass(frozen=True)
class PClass:
    items: tuple[tuple[str, str | None], ...]
    pos: int = _pfield(-1)
    block: Block | None = _pfield()
    span: SourceSpan | None = _pfield()


@dataclass(frozen=True)
class PVar:
    name: str
    pos: int = _pfield(-1)
    block: Block | None = _pfield()
    span: SourceSpan | None = _pfield()


@dataclass(frozen=True)
class PWild:
    pos: int = _pfield(-1)
    block: Block | None = _pfield()
    span: SourceSpan | None = _pfield()


@dataclass(frozen=True)
class PBind:
    """``$name:child``; an empty name marks an anonymous position."""

    name: str
    child: PExpr
    pos: int = _pfield(-1)
    block: Block | None = _pfield()
    span: SourceSpan | None = _pfield()


PExpr = Union[PSeq, PAlt, PIter, PRef, PLit, PClass, PVar, PWild, PBind]


def pattern_children(p) -> tuple:
    if isinstance(p, (PSeq, PAlt)):
        return p.items
    if isinstance(p, (PIter, PBind)):
        return (p.child,)
    return ()


def iter_pattern(p) -> Iterator:
    yield p
    for c in pattern_children(p):
        yield from iter_pattern(c)


@dataclass(frozen=True)
class ProductionPattern:
    body: PExpr
    binding: str | None = None
    block: Block | None = field(default=None, compare=False)
    span: SourceSpan | None = field(default=None, compare=False)


@dataclass(frozen=True)
class QueryPattern:
    symbol_kind: str
    symbol_name: str | None = None
    conditions: tuple[AttributeCondition, ...] = ()
    productions: tuple[ProductionPattern, ...] = ()
    symbol_block: Block | None = field(default=None, compare=False)
    span: SourceSpan | None = field(default=None, compare=False)

    def variables(self) -> list[str]:
        """Variable names in order of first appearance."""
        names = []
        if self.symbol_kind == VARIABLE:
            names.append(self.symbol_name)
        for pp in self.productions:
            if pp.binding:
                names.append(pp.binding)
            for p in iter_pattern(pp.body):
                if isinstance(p, PVar) or (isinstance(p, PBind) and p.name):
                    names.append(p.name)
        return list(dict.fromkeys(names))


# -- bindings ---------------------------------------------------------------------

@dataclass(frozen=True)
class Binding:
    """One match of a query.

    ``variables`` maps each variable to the node(s) it bound: the Symbol for
    the symbol variable, the Production for ``$p:-->``, the subexpression for
    ``$v:(...)``, and every occurrence, left to right, for ``#X`` in
    expression position. ``positions`` maps pattern positions that carry an
    annotation block to the nodes they matched.
    """

    symbol: Symbol
    productions: tuple[Production, ...]
    variables: dict[str, tuple]
    positions: dict[int, tuple] = field(default_factory=dict)

    def __getitem__(self, name):
        nodes = self.variables[name]
        return nodes[0]

    def key(self):
        return (self.symbol.id if self.symbol is not None else None,
                tuple(p.id for p in self.productions),
                tuple(sorted((k, tuple(n.id for n in v)) for k, v in self.variables.items())),
                tuple(sorted((k, tuple(n.id for n in v)) for k, v in self.positions.items())))


def atom_key(node):
    """Equality key for variable constraints: atoms compare by content."""
    if isinstance(node, SymbolRef):
        return ("ref", node.name)
    if isinstance(node, StringLiteral):
        return ("lit", node.text)
    if isinstance(node, CharClass):
        return ("class", node.items)
    return None


@dataclass(frozen=True)
class _Env:
    nodes: tuple = ()       # ((var, node), ...) in match order
    values: tuple = ()      # ((var, atom key), ...)
    positions: tuple = ()   # ((pos, node), ...)

    def value(self, name):
        for k, v in self.values:
            if k == name:
                return v
        return None

    def add_node(self, name, node, key=None):
        values = self.values
        if key is not None and self.value(name) is None:
            values = values + ((name, key),)
        return _Env(self.nodes + ((name, node),), values, self.positions)

    def add_pos(self, pos, node):
        return _Env(self.nodes, self.values, self.positions + ((pos, node),))


def _seq_view(node) -> tuple:
    return node.children if isinstance(node, Sequence) else (node,)


class _Matcher:
    def __init__(self, fixed: dict[str, object]):
        # variables fixed before expression matching (the symbol variable)
        self.fixed = fixed

    def match(self, p, node, env: _Env) -> Iterator[_Env]:
        for e in self._match(p, node, env):
            if p.block is not None:
                e = e.add_pos(p.pos, node)
            yield e

    def _match(self, p, node, env):
        if isinstance(p, PWild):
            yield env
        elif isinstance(p, PVar):
            key = atom_key(node)
            if key is None:
                return
            fixed = self.fixed.get(p.name)
            if fixed is not None and key != ("ref", fixed):
                return
            bound = env.value(p.name)
            if bound is not None and bound != key:
                return
            yield env.add_node(p.name, node, key)
        elif isinstance(p, PRef):
            if isinstance(node, SymbolRef) and node.name == p.name:
                yield env
        elif isinstance(p, PLit):
            if isinstance(node, StringLiteral) and node.text == p.text:
                yield env
        elif isinstance(p, PClass):
            if isinstance(node, CharClass) and node.items == p.items:
                yield env
        elif isinstance(p, PIter):
            if isinstance(node, Iteration) and node.kind == p.kind:
                yield from self.match(p.child, node.child, env)
        elif isinstance(p, PAlt):
            if isinstance(node, Alternative):
                yield from self.match_list(p.items, 0, node.children, 0, env)
        elif isinstance(p, PSeq):
            yield from self.match_list(p.items, 0, _seq_view(node), 0, env)
        elif isinstance(p, PBind):
            for e in self.match(p.child, node, env):
                yield e.add_node(p.name, node) if p.name else e
        else:
            raise TypeError(f"unknown pattern node {p!r}")

    def match_list(self, ps, i, nodes, j, env) -> Iterator[_Env]:
        if i == len(ps):
            if j == len(nodes):
                yield env
            return
        p = ps[i]
        if isinstance(p, PWild):
            for k in range(j, len(nodes) + 1):
                yield from self.match_list(ps, i + 1, nodes, k, env)
        elif j < len(nodes):
            for e in self.match(p, nodes[j], env):
                yield from self.match_list(ps, i + 1, nodes, j + 1, e)


def _binding(symbol, prods, env: _Env, extra) -> Binding:
    variables: dict[str, tuple] = {}
    for name, node in extra:
        variables[name] = (node,)
    fixed = set(variables)
    for name, node in env.nodes:
        if name not in fixed:
            variables[name] = variables.get(name, ()) + (node,)
    positions: dict[int, tuple] = {}
    for pos, node in env.positions:
        positions[pos] = positions.get(pos, ()) + (node,)
    return Binding(symbol, tuple(prods), variables, positions)


def match_expr(pattern: PExpr, expr) -> list[Binding]:
    """Match one expression pattern against one expression tree.

    The returned bindings have no symbol or productions; only
    ``variables``/``positions`` are meaningful.
    """
    out, seen = [], set()
    for env in _Matcher({}).match(pattern, expr, _Env()):
        b = _binding(None, (), env, ())
        k = b.key()[2:]
        if k not in seen:
            seen.add(k)
            out.append(b)
    return out


def _symbol_ok(symbol: Symbol, store: AnnotationStore | None, pattern: QueryPattern) -> bool:
    if pattern.symbol_kind == LITERAL and symbol.name != pattern.symbol_name:
        return False
    for cond in pattern.conditions:
        value = store.lookup(symbol.id, cond.name) if store is not None else None
        if not check_condition(value, cond):
            return False
    return True


def match(grammar: model.Grammar, store: AnnotationStore | None,
          pattern: QueryPattern) -> list[Binding]:
    """All bindings of ``pattern`` in ``grammar``.

    Order: symbol declaration order, then production order, then left to
    right within the production. Identical bindings are reported once.
    """
    if isinstance(pattern, str):
        from .syntax.parser import parse_query
        pattern = parse_query(pattern)
    if pattern.symbol_kind == GRAMMAR:
        raise ValueError("grammar-level rules are not queries")
    out: list[Binding] = []
    seen = set()

    def emit(b: Binding):
        k = b.key()
        if k not in seen:
            seen.add(k)
            out.append(b)

    for symbol in grammar.symbols:
        if not _symbol_ok(symbol, store, pattern):
            continue
        fixed = {}
        extra = []
        if pattern.symbol_kind == VARIABLE:
            fixed[pattern.symbol_name] = symbol.name
            extra.append((pattern.symbol_name, symbol))
        matcher = _Matcher(fixed)
        pps = pattern.productions
        if not pps:
            emit(_binding(symbol, (), _Env(), extra))
        elif len(pps) == 1:
            pp = pps[0]
            for prod in symbol.productions:
                ex = extra + [(pp.binding, prod)] if pp.binding else extra
                for env in matcher.match(pp.body, prod.body, _Env()):
                    emit(_binding(symbol, (prod,), env, ex))
        elif len(pps) == len(symbol.productions):
            ex = extra + [(pp.binding, prod) for pp, prod in zip(pps, symbol.productions)
                          if pp.binding]
            for env in _match_all(matcher, pps, symbol.productions, 0, _Env()):
                emit(_binding(symbol, symbol.productions, env, ex))
    return out


def _match_all(matcher, pps, prods, i, env):
    if i == len(pps):
        yield env
        return
    for e in matcher.match(pps[i].body, prods[i].body, env):
        yield from _match_all(matcher, pps, prods, i + 1, e)
