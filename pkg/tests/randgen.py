"""Seeded random grammars and query patterns for oracle comparison."""

from __future__ import annotations

import random

from grammatic.model import (Alternative, CharClass, Grammar, Iteration, Production, Sequence,
                             StringLiteral, Symbol, SymbolRef)
from grammatic.query import (ANONYMOUS, LITERAL, VARIABLE, PAlt, PBind, PClass, PIter, PLit,
                             PRef, PSeq, ProductionPattern, PVar, PWild, QueryPattern)

NAMES = ["a", "b", "c", "d", "e"]
LITERALS = ["x", "y", "+"]
CLASSES = [(("0", "9"),), (("a", "z"), ("_", None))]
KINDS = ["star", "plus", "option"]
VARS = ["A", "B", "S"]

MAX_SYMBOLS = 5
MAX_DEPTH = 4


def random_atom(rng, names):
    r = rng.random()
    if r < 0.55:
        return SymbolRef(rng.choice(names))
    if r < 0.85:
        return StringLiteral(rng.choice(LITERALS))
    return CharClass(rng.choice(CLASSES))


def random_expr(rng, names, depth):
    if depth <= 1 or rng.random() < 0.4:
        return random_atom(rng, names)
    r = rng.random()
    if r < 0.45:
        children = []
        for _ in range(rng.randint(2, 4)):
            c = random_expr(rng, names, depth - 1)
            # sequences never directly contain sequences
            children.extend(c.children if isinstance(c, Sequence) else (c,))
        return Sequence(tuple(children))
    if r < 0.7:
        return Alternative(tuple(random_expr(rng, names, depth - 1)
                                 for _ in range(rng.randint(2, 3))))
    return Iteration(random_expr(rng, names, depth - 1), rng.choice(KINDS))


def random_grammar(seed: int) -> Grammar:
    rng = random.Random(seed)
    names = NAMES[:rng.randint(1, MAX_SYMBOLS)]
    symbols = []
    for name in names:
        prods = tuple(Production(random_expr(rng, names, rng.randint(1, MAX_DEPTH)))
                      for _ in range(rng.randint(1, 3)))
        symbols.append(Symbol(name, prods))
    return Grammar(tuple(symbols), f"<random {seed}>")


def to_pattern(expr):
    if isinstance(expr, Sequence):
        return PSeq(tuple(to_pattern(c) for c in expr.children))
    if isinstance(expr, Alternative):
        return PAlt(tuple(to_pattern(c) for c in expr.children))
    if isinstance(expr, Iteration):
        return PIter(to_pattern(expr.child), expr.kind)
    if isinstance(expr, SymbolRef):
        return PRef(expr.name)
    if isinstance(expr, StringLiteral):
        return PLit(expr.text)
    return PClass(expr.items)


class _Mutator:
    def __init__(self, rng):
        self.rng = rng
        self.binds = 0

    def bind_name(self):
        self.binds += 1
        return f"p{self.binds}"

    def mutate(self, p):
        rng = self.rng
        if rng.random() < 0.08:
            return PWild()
        if isinstance(p, (PRef, PLit, PClass)):
            if rng.random() < 0.45:
                p = PVar(rng.choice(VARS))
        elif isinstance(p, PSeq):
            items = [self.mutate(c) for c in p.items]
            if rng.random() < 0.5 and items:
                i = rng.randrange(len(items))
                j = rng.randint(i, len(items))
                items[i:j] = [PWild()]
            p = PSeq(tuple(items))
        elif isinstance(p, PAlt):
            p = PAlt(tuple(self.mutate(c) for c in p.items))
        elif isinstance(p, PIter):
            p = PIter(self.mutate(p.child), p.kind)
        if not isinstance(p, PWild) and rng.random() < 0.15:
            p = PBind(self.bind_name(), p)
        return p

    def random_pattern(self, depth):
        rng = self.rng
        if depth <= 1 or rng.random() < 0.35:
            r = rng.random()
            if r < 0.3:
                return PVar(rng.choice(VARS))
            if r < 0.45:
                return PWild()
            return to_pattern(random_atom(rng, NAMES))
        r = rng.random()
        if r < 0.55:
            return PSeq(tuple(self.random_pattern(depth - 1) for _ in range(rng.randint(1, 4))))
        if r < 0.75:
            return PAlt(tuple(self.random_pattern(depth - 1) for _ in range(rng.randint(2, 3))))
        return PIter(self.random_pattern(depth - 1), rng.choice(KINDS))


def random_patterns(grammar: Grammar, seed: int, count: int = 20) -> list[QueryPattern]:
    rng = random.Random(seed * 7919 + 1)
    out = []
    for _ in range(count):
        m = _Mutator(rng)
        r = rng.random()
        if r < 0.35:
            kind, name = VARIABLE, "S"
        elif r < 0.6:
            kind, name = LITERAL, rng.choice(NAMES)
        else:
            kind, name = ANONYMOUS, None
        sym = rng.choice(grammar.symbols)
        r = rng.random()
        if r < 0.05:
            bodies = []
        elif r < 0.8:
            prod = rng.choice(sym.productions)
            bodies = [m.mutate(to_pattern(prod.body)) if rng.random() < 0.75
                      else m.random_pattern(3)]
        else:
            bodies = [m.mutate(to_pattern(p.body)) for p in sym.productions]
        pps = tuple(ProductionPattern(b, m.bind_name() if rng.random() < 0.2 else None)
                    for b in bodies)
        out.append(QueryPattern(kind, name, (), pps))
    return out
