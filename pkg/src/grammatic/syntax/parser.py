"""Recursive-descent parsers for grammar units, queries and aspect files."""

from __future__ import annotations

import dataclasses

from ..aspects import Aspect, AspectRule
from ..errors import GrammaticError, ParseError, SourceSpan
from ..metadata import (ABSENT, EQUALS, INT_MAX, INT_MIN, NO_VALUE, PRESENT, PUNCTUATION,
                        TYPE, VALUE_KINDS, AttributeCondition, Id, Int, Punct, Seq, Str,
                        Tuple)
from ..model import (OPTION, PLUS, STAR, CharClass, Iteration, Placeholder, Production,
                     Sequence, StringLiteral, Symbol, SymbolRef, TemplateCall, alt, seq)
from ..query import (ANONYMOUS, GRAMMAR, LITERAL, VARIABLE, Assignment, Block, Entry, PAlt,
                     PBind, PClass, PIter, PLit, PRef, PSeq, PVar, PWild, ProductionPattern,
                     QueryPattern, iter_pattern)
from ..templates import (PARAM_KINDS, PRODUCTION, PRODUCTIONS, RESULT_KINDS, SYMBOL,
                         ImportDecl, Param, ParsedUnit, TemplateDef, check_template)
from .lexer import EOF, IDENT, INT, PUNCT, STRING, Token, tokenize

_POSTFIX = {"*": STAR, "+": PLUS, "?": OPTION}


class Parser:
    def __init__(self, text: str, file: str = "<string>"):
        self.file = file
        self.toks = tokenize(text, file)
        self.i = 0
        self.in_template = False
        self.in_aspect = False
        self.npos = 0

    # -- token plumbing -----------------------------------------------------------

    def peek(self, k: int = 0) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> Token:
        tok = self.peek()
        if tok.type != EOF:
            self.i += 1
        return tok

    @property
    def prev(self) -> Token:
        return self.toks[max(self.i - 1, 0)]

    def at(self, *puncts: str) -> bool:
        return self.peek().is_punct(*puncts)

    def accept(self, punct: str) -> Token | None:
        if self.at(punct):
            return self.next()
        return None

    def expect(self, punct: str) -> Token:
        if not self.at(punct):
            self.fail(f"unexpected {self.peek().describe()}", {repr(punct)})
        return self.next()

    def ident(self, what: str = "identifier") -> Token:
        if self.peek().type != IDENT:
            self.fail(f"unexpected {self.peek().describe()}", {what})
        return self.next()

    def fail(self, message: str, expected=(), tok: Token | None = None):
        tok = tok or self.peek()
        raise ParseError(message, tok.span, frozenset(expected))

    def span(self, start: Token) -> SourceSpan:
        end = self.prev if self.i > 0 else start
        if (end.span.end_line, end.span.end_col) < (start.span.start_line, start.span.start_col):
            return start.span
        return start.span.to(end.span)

    def at_end(self) -> bool:
        return self.peek().type == EOF

    # -- grammar units --------------------------------------------------------------

    def unit(self) -> ParsedUnit:
        imports, templates, rules = [], [], []
        names: dict[str, Symbol] = {}
        while not self.at_end():
            t0, t1, t2 = self.peek(), self.peek(1), self.peek(2)
            if t0.type == IDENT and t0.value == "import" and t1.type == IDENT:
                imports.append(self.import_decl())
            elif t0.type == IDENT and t1.type == IDENT and t2.is_punct("<"):
                templates.append(self.template_def())
            else:
                start = self.peek()
                rule = self.rule()
                if rule.name in names:
                    raise ParseError(f"duplicate rule for symbol {rule.name!r}", start.span)
                names[rule.name] = rule
                rules.append(rule)
        return ParsedUnit(tuple(imports), tuple(templates), tuple(rules), origin=self.file)

    def import_decl(self) -> ImportDecl:
        start = self.next()
        name = self.ident("unit or template name").value
        args = None
        if self.accept("<"):
            args = self.template_args()
        self.expect(";")
        return ImportDecl(name, args, span=self.span(start))

    def template_args(self) -> tuple:
        args = []
        if self.accept(">"):
            return ()
        while True:
            args.append(tuple(p.body for p in self.productions()))
            if self.accept(">"):
                return tuple(args)
            if not self.accept(","):
                self.fail(f"unexpected {self.peek().describe()} in template arguments",
                          {"','", "'>'"})

    def template_def(self) -> TemplateDef:
        start = self.peek()
        kind = self.next().value
        if kind not in RESULT_KINDS:
            self.fail(f"unknown template kind {kind!r}", set(RESULT_KINDS), tok=start)
        name = self.ident("template name").value
        self.expect("<")
        params = []
        if not self.accept(">"):
            while True:
                ktok = self.ident("placeholder kind")
                pkind = ktok.value
                if pkind == PRODUCTION and self.accept("*"):
                    pkind = PRODUCTIONS
                if pkind not in PARAM_KINDS:
                    self.fail(f"unknown placeholder kind {pkind!r}",
                              {"ID", "Symbol", "Expression", "Production"}, tok=ktok)
                self.expect("$")
                params.append(Param(pkind, self.ident("placeholder name").value))
                if self.accept(">"):
                    break
                self.expect(",")
        self.expect("{")
        saved, self.in_template = self.in_template, True
        try:
            if kind == SYMBOL:
                body, seen = [], set()
                while not self.at("}"):
                    rtok = self.peek()
                    rule = self.rule()
                    if rule.name in seen:
                        raise ParseError(f"duplicate rule {rule.name!r} in template", rtok.span)
                    seen.add(rule.name)
                    body.append(rule)
            else:
                body = self.productions()
                self.accept(";")
        finally:
            self.in_template = saved
        self.expect("}")
        tpl = TemplateDef(name, kind, tuple(params), tuple(body), span=self.span(start))
        check_template(tpl)
        return tpl

    def rule(self) -> Symbol:
        start = self.peek()
        if self.in_template and self.accept("$"):
            name = "$" + self.ident("placeholder name").value
        else:
            name = self.ident("symbol name").value
        if not (self.accept(":") or self.accept("-->")):
            self.fail(f"unexpected {self.peek().describe()} after rule name", {"':'", "'-->'"})
        prods = self.productions()
        self.expect(";")
        return Symbol(name, tuple(prods), span=self.span(start))

    def productions(self) -> list[Production]:
        prods = []
        while True:
            start = self.peek()
            body = self.expr()
            prods.append(Production(body, span=self.span(start)))
            if not self.accept("||"):
                return prods

    def expr(self):
        start = self.peek()
        items = [self.sequence()]
        while self.accept("|"):
            items.append(self.sequence())
        return alt(*items, span=self.span(start))

    def starts_atom(self) -> bool:
        t = self.peek()
        if t.type == IDENT:
            return True
        if t.type == STRING:
            return t.quote in ("'", '"')
        if t.type == PUNCT:
            return t.value in ("[", "(") or (t.value == "$" and self.in_template)
        return False

    def sequence(self):
        start = self.peek()
        items = []
        while self.starts_atom():
            items.append(self.postfix())
        if not items:
            return Sequence((), span=start.span)
        return seq(*items, span=self.span(start))

    def postfix(self):
        start = self.peek()
        node = self.atom()
        while self.peek().type == PUNCT and self.peek().value in _POSTFIX:
            node = Iteration(node, _POSTFIX[self.next().value], span=self.span(start))
        return node

    def atom(self):
        tok = self.peek()
        if tok.type == IDENT:
            self.next()
            if self.at("<"):
                self.next()
                args = self.template_args()
                return TemplateCall(tok.value, args, span=self.span(tok))
            return SymbolRef(tok.value, span=tok.span)
        if tok.type == STRING:
            self.next()
            if not tok.value:
                raise ParseError("empty string literal", tok.span)
            return StringLiteral(tok.value, span=tok.span)
        if tok.is_punct("["):
            return CharClass(self.char_class(), span=self.span(tok))
        if tok.is_punct("("):
            self.next()
            inner = self.expr()
            self.expect(")")
            return inner
        if tok.is_punct("$"):
            self.next()
            return Placeholder(self.ident("placeholder name").value, span=self.span(tok))
        self.fail(f"unexpected {tok.describe()}", {"identifier", "string literal", "'['", "'('"})

    def char_class(self) -> tuple:
        self.expect("[")
        items = []
        while not self.at("]"):
            lo = self._class_char()
            hi = None
            if self.accept("--"):
                hi = self._class_char()
                if lo > hi:
                    self.fail(f"reversed character range {lo!r}--{hi!r}", tok=self.prev)
            items.append((lo, hi))
        if not items:
            self.fail("empty character class", {"string literal"})
        self.expect("]")
        return tuple(items)

    def _class_char(self) -> str:
        tok = self.peek()
        if tok.type != STRING or tok.quote not in ("'", '"'):
            self.fail(f"unexpected {tok.describe()} in character class",
                      {"string literal", "']'"})
        if len(tok.value) != 1:
            self.fail("character class items must be single characters", tok=tok)
        self.next()
        return tok.value

    # -- metadata values --------------------------------------------------------------

    def value(self):
        tok = self.peek()
        if tok.type == IDENT:
            self.next()
            return Id(tok.value)
        if tok.type == STRING:
            self.next()
            return Str(tok.value)
        if tok.type == INT:
            self.next()
            return self._int(tok.value, tok)
        if tok.is_punct("-") and self.peek(1).type == INT:
            self.next()
            num = self.next()
            return self._int("-" + num.value, tok)
        if tok.is_punct("{{"):
            return self.sequence_value()
        if tok.is_punct("{"):
            return self.tuple_value()
        self.fail(f"unexpected {tok.describe()} where a value was expected",
                  {"identifier", "string", "integer", "'{'", "'{{'"})

    def _int(self, text: str, tok: Token) -> Int:
        v = int(text)
        if not INT_MIN <= v <= INT_MAX:
            raise ParseError(f"integer {text} does not fit in 64 bits", tok.span)
        return Int(v)

    def tuple_value(self) -> Tuple:
        self.expect("{")
        fields = []
        seen = set()
        while not self.at("}"):
            name_tok = self.ident("field name")
            if name_tok.value in seen:
                raise ParseError(f"duplicate tuple field {name_tok.value!r}", name_tok.span)
            seen.add(name_tok.value)
            v = self.value() if self.accept("=") else NO_VALUE
            fields.append((name_tok.value, v))
            self.expect(";")
        self.expect("}")
        return Tuple(tuple(fields))

    def sequence_value(self) -> Seq:
        start = self.expect("{{")
        elems = []
        while not self.at("}}"):
            tok = self.peek()
            if tok.type == EOF:
                raise ParseError("unterminated {{...}} sequence", start.span)
            if tok.type == IDENT:
                elems.append(Id(self.next().value))
            elif tok.type == STRING:
                elems.append(Str(self.next().value))
            elif tok.type == INT:
                elems.append(self._int(self.next().value, tok))
            elif tok.is_punct("-") and self.peek(1).type == INT and self.peek(1).glued:
                # "-1" is a negative integer, "- 1" is punctuation then 1
                self.next()
                elems.append(self._int("-" + self.next().value, tok))
            elif tok.is_punct("{{"):
                elems.append(self.sequence_value())
            elif tok.is_punct("{"):
                elems.append(self.tuple_value())
            else:
                for ch in tok.value:
                    if ch not in PUNCTUATION:
                        self.fail(f"{ch!r} is not allowed in a sequence", tok=tok)
                    elems.append(Punct(ch))
                self.next()
        self.expect("}}")
        return Seq(tuple(elems))

    # -- queries ------------------------------------------------------------------------

    def _newpos(self) -> int:
        self.npos += 1
        return self.npos

    def at_production_binding(self, k: int = 0) -> bool:
        if not self.peek(k).is_punct("$"):
            return False
        if self.peek(k + 1).is_punct(":"):
            return self.peek(k + 2).is_punct("-->")
        return (self.peek(k + 1).type == IDENT and self.peek(k + 2).is_punct(":")
                and self.peek(k + 3).is_punct("-->"))

    def query(self) -> QueryPattern:
        start = self.peek()
        name = None
        if self.accept("#"):
            kind, name = VARIABLE, self.ident("variable name").value
        elif start.type == IDENT:
            kind, name = LITERAL, self.next().value
        elif self.at("-->") or self.at_production_binding():
            kind = ANONYMOUS
        else:
            self.fail(f"unexpected {start.describe()} at start of query",
                      {"'#'", "symbol name", "'-->'", "'$'"})
        conditions = self.conditions() if self.at("{") else ()
        symbol_block = self.block() if self.at("[[") else None
        prods = []
        while self.at("-->") or self.at_production_binding():
            prods.append(self.production_pattern())
        if prods:
            self.expect(";")
        else:
            if kind == ANONYMOUS:
                self.fail("empty query", {"'-->'"})
            self.accept(";")
        pattern = QueryPattern(kind, name, tuple(conditions), tuple(prods), symbol_block,
                               span=self.span(start))
        self.check_variables(pattern)
        return pattern

    def conditions(self) -> list[AttributeCondition]:
        self.expect("{")
        conds = []
        while not self.at("}"):
            if self.accept("!"):
                conds.append(AttributeCondition(ABSENT, self.ident("attribute name").value))
            else:
                name = self.ident("attribute name").value
                if self.accept("="):
                    conds.append(AttributeCondition(EQUALS, name, value=self.value()))
                elif self.accept(":"):
                    ttok = self.ident("value type")
                    if ttok.value not in VALUE_KINDS | {"NONE"}:
                        self.fail(f"unknown value type {ttok.value!r}", VALUE_KINDS, tok=ttok)
                    conds.append(AttributeCondition(TYPE, name, type_name=ttok.value))
                else:
                    conds.append(AttributeCondition(PRESENT, name))
            if not self.accept(";") and not self.at("}"):
                self.fail(f"unexpected {self.peek().describe()} in condition list",
                          {"';'", "'}'"})
        self.expect("}")
        return conds

    def production_pattern(self) -> ProductionPattern:
        start = self.peek()
        binding = None
        if self.accept("$"):
            binding = self.next().value if self.peek().type == IDENT else ""
            self.expect(":")
        self.expect("-->")
        if not self.starts_patom():
            self.fail("empty production pattern",
                      {"'#'", "'..'", "symbol name", "string literal", "'('", "'['"})
        body = self.palt(0)
        block = self.block() if self.at("[[") else None
        return ProductionPattern(body, binding, block, span=self.span(start))

    def starts_patom(self) -> bool:
        t = self.peek()
        if t.type == IDENT:
            return True
        if t.type == STRING:
            return t.quote in ("'", '"')
        if t.is_punct("$"):
            return not self.at_production_binding()
        return t.is_punct("#", "..", "[", "(")

    def palt(self, depth: int):
        start = self.peek()
        items = [self.pseq(depth)]
        while self.accept("|"):
            items.append(self.pseq(depth))
        if len(items) == 1:
            return items[0]
        return PAlt(tuple(items), pos=self._newpos(), span=self.span(start))

    def pseq(self, depth: int):
        start = self.peek()
        items = []
        while self.starts_patom():
            items.append(self.pelement(depth))
        if len(items) == 1:
            return items[0]
        return PSeq(tuple(items), pos=self._newpos(), span=self.span(start))

    def pelement(self, depth: int):
        start = self.peek()
        if self.at("$"):
            self.next()
            name = self.next().value if self.peek().type == IDENT else ""
            self.expect(":")
            child = self.ppostfix(depth)
            if isinstance(child, PWild):
                self.fail("a wildcard cannot be bound", tok=start)
            el = PBind(name, child, pos=self._newpos(), span=self.span(start))
        else:
            el = self.ppostfix(depth)
        if self.at("[["):
            if depth == 0 and self.block_ends_production():
                return el
            if isinstance(el, PWild):
                self.fail("a wildcard cannot be annotated")
            el = dataclasses.replace(el, block=self.block())
        return el

    def block_ends_production(self) -> bool:
        k = 0
        while not self.peek(k).is_punct("]]"):
            if self.peek(k).type == EOF:
                return True
            k += 1
        after = self.peek(k + 1)
        return (after.type == EOF or after.is_punct(";", "-->", "[[")
                or self.at_production_binding(k + 1))

    def ppostfix(self, depth: int):
        start = self.peek()
        node = self.patom(depth)
        while self.peek().type == PUNCT and self.peek().value in _POSTFIX:
            node = PIter(node, _POSTFIX[self.next().value], pos=self._newpos(),
                         span=self.span(start))
        return node

    def patom(self, depth: int):
        tok = self.peek()
        if self.accept("#"):
            return PVar(self.ident("variable name").value, pos=self._newpos(),
                        span=self.span(tok))
        if self.accept(".."):
            return PWild(pos=self._newpos(), span=tok.span)
        if tok.type == IDENT:
            self.next()
            return PRef(tok.value, pos=self._newpos(), span=tok.span)
        if tok.type == STRING:
            self.next()
            if not tok.value:
                raise ParseError("empty string literal", tok.span)
            return PLit(tok.value, pos=self._newpos(), span=tok.span)
        if tok.is_punct("["):
            return PClass(self.char_class(), pos=self._newpos(), span=self.span(tok))
        if tok.is_punct("("):
            self.next()
            inner = self.palt(depth + 1)
            self.expect(")")
            return inner
        self.fail(f"unexpected {tok.describe()} in pattern",
                  {"'#'", "'..'", "symbol name", "string literal", "'('", "'['"})

    # -- blocks ----------------------------------------------------------------------------

    def block(self) -> Block:
        start = self.peek()
        if not self.in_aspect:
            self.fail("annotation blocks are only allowed in aspect files")
        self.expect("[[")
        assigns, entries = [], []
        while not self.at("]]"):
            t0, t1, t2 = self.peek(), self.peek(1), self.peek(2)
            if t0.type == IDENT and t1.is_punct("{"):
                entries.append(self.entry())
            elif t0.is_punct("#", "$") and t1.type == IDENT and t2.is_punct("{"):
                entries.append(self.entry())
            else:
                assigns.append(self.assignment())
        self.expect("]]")
        return Block(tuple(assigns), tuple(entries), span=self.span(start))

    def entry(self) -> Entry:
        start = self.peek()
        if self.at("#") or self.at("$"):
            self.next()
        var = self.ident("variable name").value
        self.expect("{")
        assigns = []
        while not self.at("}"):
            assigns.append(self.assignment())
        self.expect("}")
        self.accept(";")
        return Entry(var, tuple(assigns), span=self.span(start))

    def assignment(self) -> Assignment:
        start = self.peek()
        occurrence = None
        if self.accept("#"):
            occurrence = self.ident("symbol or variable name").value
            self.expect(".")
        name = self.ident("attribute name").value
        value = self.value() if self.accept("=") else NO_VALUE
        self.expect(";")
        return Assignment(name, value, occurrence, span=self.span(start))

    def check_variables(self, pattern: QueryPattern) -> None:
        hashed, dollars = set(), set()
        if pattern.symbol_kind == VARIABLE:
            hashed.add(pattern.symbol_name)
        for pp in pattern.productions:
            if pp.binding:
                if pp.binding in dollars:
                    raise ParseError(f"variable ${pp.binding} bound twice", pp.span)
                dollars.add(pp.binding)
            for p in iter_pattern(pp.body):
                if isinstance(p, PVar):
                    hashed.add(p.name)
                elif isinstance(p, PBind) and p.name:
                    if p.name in dollars:
                        raise ParseError(f"variable ${p.name} bound twice", p.span)
                    dollars.add(p.name)
        clash = hashed & dollars
        if clash:
            raise ParseError(f"variable {sorted(clash)[0]!r} used with both '#' and '$'",
                             pattern.span)

    # -- aspects ----------------------------------------------------------------------------

    def aspect(self) -> Aspect:
        rules = []
        while not self.at_end():
            start = self.peek()
            if start.is_punct("@") and self.peek(1).type == IDENT:
                self.next()
                target = self.next()
                if target.value != "grammar":
                    self.fail(f"unknown rule target @{target.value}", {"@grammar"}, tok=target)
                block = self.block()
                self.accept(";")
                pattern = QueryPattern(GRAMMAR, symbol_block=block, span=self.span(start))
            else:
                pattern = self.query()
            trailing = None
            if self.at("[["):
                trailing = self.block()
                self.accept(";")
            rule = AspectRule(pattern, trailing, span=self.span(start))
            _validate_rule(rule)
            rules.append(rule)
        return Aspect(tuple(rules), self.file)


def _blocks(pattern: QueryPattern):
    if pattern.symbol_block is not None:
        yield pattern.symbol_block
    for pp in pattern.productions:
        for p in iter_pattern(pp.body):
            if p.block is not None:
                yield p.block
        if pp.block is not None:
            yield pp.block


def _validate_rule(rule: AspectRule) -> None:
    bound = set(rule.pattern.variables())
    blocks = list(_blocks(rule.pattern))
    if rule.trailing is not None:
        blocks.append(rule.trailing)
        for a in rule.trailing.assignments:
            if a.occurrence is None:
                raise ParseError(
                    f"assignment to {a.name!r} in a trailing block needs a target variable",
                    a.span)
    for b in blocks:
        for e in b.entries:
            if e.variable not in bound:
                raise ParseError(f"unbound variable {e.variable}", e.span)


def _run(text: str, file: str, method: str, aspect: bool = False):
    p = Parser(text, file)
    p.in_aspect = aspect
    result = getattr(p, method)()
    if not p.at_end():
        p.fail(f"unexpected {p.peek().describe()} after end of {method}")
    return result


def parse_grammar(text: str, file: str = "<string>") -> ParsedUnit:
    """Parse a grammar unit: rules, imports and template definitions."""
    return _run(text, file, "unit")


def parse_query(text: str, file: str = "<query>") -> QueryPattern:
    """Parse a standalone query such as ``#Rec --> #Rec .. ;``."""
    return _run(text, file, "query")


def parse_aspect(text: str, file: str = "<string>") -> Aspect:
    return _run(text, file, "aspect", aspect=True)


def parse_value(text: str, file: str = "<value>"):
    """Parse one attribute value in concrete syntax (``{ a = b; }``, ``{{ ... }}``, ...)."""
    return _run(text, file, "value")


__all__ = ["Parser", "parse_grammar", "parse_query", "parse_aspect", "parse_value",
           "GrammaticError"]
