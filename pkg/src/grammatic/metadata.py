"""Attribute values, the external annotation store, and attribute conditions.

Values come in five built-in kinds (``ID``, ``STRING``, ``INTEGER``,
``TUPLE``, ``SEQUENCE``) plus :data:`NO_VALUE` for presence-only
attributes. Sequence elements reuse :class:`Id`, :class:`Str`, :class:`Int`,
:class:`Tuple` and :class:`Seq` and add :class:`Punct`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Union

from . import model
from .errors import MetadataError, SourceSpan

INT_MIN, INT_MAX = -(2 ** 63), 2 ** 63 - 1
PUNCTUATION = frozenset("(),;.^+-*/=<>[]?!:|&@#%")


@dataclass(frozen=True)
class Id:
    name: str
    kind = "ID"


@dataclass(frozen=True)
class Str:
    text: str
    kind = "STRING"


@dataclass(frozen=True)
class Int:
    value: int
    kind = "INTEGER"

    def __post_init__(self):
        if not INT_MIN <= self.value <= INT_MAX:
            raise MetadataError(f"integer {self.value} out of 64-bit range")


@dataclass(frozen=True)
class Tuple:
    fields: tuple[tuple[str, Value], ...]
    kind = "TUPLE"

    def __post_init__(self):
        names = [n for n, _ in self.fields]
        if len(set(names)) != len(names):
            raise MetadataError(f"duplicate tuple field in {names}")

    def get(self, name: str) -> Value | None:
        for n, v in self.fields:
            if n == name:
                return v
        return None

    def keys(self) -> list[str]:
        return [n for n, _ in self.fields]


@dataclass(frozen=True)
class Punct:
    char: str
    kind = "PUNCT"

    def __post_init__(self):
        if self.char not in PUNCTUATION:
            raise MetadataError(f"{self.char!r} is not a sequence punctuation token")


@dataclass(frozen=True)
class Seq:
    elements: tuple[SeqElement, ...]
    kind = "SEQUENCE"

    def __post_init__(self):
        for e in self.elements:
            if not isinstance(e, (Id, Str, Int, Tuple, Seq, Punct)):
                raise MetadataError(f"invalid sequence element {e!r}")


class _NoValue:
    kind = "NONE"
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NO_VALUE"

    def __reduce__(self):
        return (_NoValue, ())


NO_VALUE = _NoValue()

Value = Union[Id, Str, Int, Tuple, Seq, _NoValue]
SeqElement = Union[Id, Str, Int, Tuple, Seq, Punct]
VALUE_KINDS = frozenset({"ID", "STRING", "INTEGER", "TUPLE", "SEQUENCE"})


# -- concrete syntax -----------------------------------------------------------

_ESCAPES = {"\\": "\\\\", "'": "\\'", "\n": "\\n", "\r": "\\r", "\t": "\\t"}


def quote(text: str) -> str:
    return "'" + "".join(_ESCAPES.get(c, c) for c in text) + "'"


def format_value(value: Value) -> str:
    """Render a value in the concrete syntax accepted by aspect files."""
    if value is NO_VALUE:
        return ""
    if isinstance(value, Id):
        return value.name
    if isinstance(value, Str):
        return quote(value.text)
    if isinstance(value, Int):
        return str(value.value)
    if isinstance(value, Punct):
        return value.char
    if isinstance(value, Tuple):
        parts = [f"{n};" if v is NO_VALUE else f"{n} = {format_value(v)};"
                 for n, v in value.fields]
        return "{ " + " ".join(parts) + " }" if parts else "{ }"
    if isinstance(value, Seq):
        inner = " ".join(format_value(e) for e in value.elements)
        return "{{ " + inner + " }}" if inner else "{{ }}"
    raise TypeError(f"not an attribute value: {value!r}")


def seq_text(elements: Iterable[SeqElement]) -> str:
    """Join sequence tokens back into compact source-like text."""
    out = []
    prev_word = False
    for e in elements:
        word = isinstance(e, (Id, Int, Str))
        if out and word and prev_word:
            out.append(" ")
        out.append(format_value(e) if not isinstance(e, Punct) else e.char)
        prev_word = word
    return "".join(out)


# -- token streams for embedded DSLs -------------------------------------------

class TokenStream:
    """Cursor over a SEQUENCE value, the entry point for embedded DSL parsers.

    Custom value types are expressed as DSLs over sequence payloads: a tool
    receives the :class:`Seq`, walks it with this class and raises
    :class:`~grammatic.errors.MetadataError` pointing at the offending token.
    """

    def __init__(self, seq: Seq | Iterable[SeqElement], what: str = "sequence"):
        self.elements = tuple(seq.elements if isinstance(seq, Seq) else seq)
        self.pos = 0
        self.what = what

    def at_end(self) -> bool:
        return self.pos >= len(self.elements)

    def peek(self, offset: int = 0) -> SeqElement | None:
        i = self.pos + offset
        return self.elements[i] if i < len(self.elements) else None

    def next(self) -> SeqElement:
        tok = self.peek()
        if tok is None:
            self.fail("unexpected end")
        self.pos += 1
        return tok

    def is_punct(self, char: str, offset: int = 0) -> bool:
        tok = self.peek(offset)
        return isinstance(tok, Punct) and tok.char == char

    def accept(self, char: str) -> bool:
        if self.is_punct(char):
            self.pos += 1
            return True
        return False

    def expect(self, char: str) -> None:
        if not self.accept(char):
            self.fail(f"expected {char!r}")

    def ident(self) -> str:
        tok = self.peek()
        if not isinstance(tok, Id):
            self.fail("expected identifier")
        self.pos += 1
        return tok.name

    def fail(self, message: str):
        tok = self.peek()
        found = "end of sequence" if tok is None else repr(format_value(tok))
        raise MetadataError(f"{self.what}: {message} at token {self.pos} (found {found})")


# -- annotation store ------------------------------------------------------------

@dataclass(frozen=True)
class Attachment:
    node: model.NodeId
    name: str
    value: Value
    origin: SourceSpan | None = None


class AnnotationStore:
    """Maps NodeIds of one grammar to ordered attribute lists.

    The grammar itself is never touched. Re-attaching a name that is
    already present on a node raises, naming both origins.
    """

    def __init__(self, grammar: model.Grammar):
        self.grammar = grammar
        self._nodes = {grammar.id: grammar}
        self._nodes.update((item.id, item.node) for item in model.walk(grammar))
        self._attrs: dict[model.NodeId, dict[str, Attachment]] = {}

    def copy(self) -> AnnotationStore:
        new = object.__new__(AnnotationStore)
        new.grammar = self.grammar
        new._nodes = self._nodes
        new._attrs = {k: dict(v) for k, v in self._attrs.items()}
        return new

    def node(self, node_id: model.NodeId):
        return self._nodes[node_id]

    def __contains__(self, node_id) -> bool:
        return node_id in self._nodes

    def attach(self, node: model.NodeId, name: str, value: Value,
               origin: SourceSpan | None = None) -> AnnotationStore:
        if node not in self._nodes:
            raise MetadataError(f"unknown node {node!r}", origin)
        attrs = self._attrs.setdefault(node, {})
        if name in attrs:
            prev = attrs[name].origin
            where = f" (first attached at {prev})" if prev else ""
            raise MetadataError(
                f"duplicate attribute {name!r} on {_describe(self._nodes[node])}{where}",
                origin)
        attrs[name] = Attachment(node, name, value, origin)
        return self

    def lookup(self, node: model.NodeId, name: str) -> Value | None:
        att = self._attrs.get(node, {}).get(name)
        return None if att is None else att.value

    def attributes(self, node: model.NodeId) -> list[tuple[str, Value]]:
        return [(a.name, a.value) for a in self._attrs.get(node, {}).values()]

    def attachment(self, node: model.NodeId, name: str) -> Attachment | None:
        return self._attrs.get(node, {}).get(name)

    def __iter__(self) -> Iterator[Attachment]:
        for attrs in self._attrs.values():
            yield from attrs.values()

    def __len__(self):
        return sum(len(a) for a in self._attrs.values())

    def as_dict(self) -> dict[model.NodeId, dict[str, Value]]:
        return {k: {n: a.value for n, a in v.items()} for k, v in self._attrs.items() if v}

    def __eq__(self, other):
        if not isinstance(other, AnnotationStore):
            return NotImplemented
        return self.grammar is other.grammar and self.as_dict() == other.as_dict()


def _describe(node) -> str:
    kind = model.kind_of(node)
    if isinstance(node, (model.Symbol, model.SymbolRef)):
        return f"{kind} {node.name!r}"
    span = getattr(node, "span", None)
    if span:
        return f"{kind} at {span}"
    return kind


# -- conditions ------------------------------------------------------------------

EQUALS, PRESENT, TYPE, ABSENT = "equals", "present", "type", "absent"


@dataclass(frozen=True)
class AttributeCondition:
    """One of ``attr = value``, ``attr``, ``attr : TYPE`` or ``!attr``."""

    kind: str
    name: str
    value: Value | None = None
    type_name: str | None = None

    def __str__(self):
        if self.kind == EQUALS:
            return f"{self.name} = {format_value(self.value)}"
        if self.kind == TYPE:
            return f"{self.name} : {self.type_name}"
        if self.kind == ABSENT:
            return f"!{self.name}"
        return self.name


def check_condition(value: Value | None, cond: AttributeCondition) -> bool:
    if cond.kind == ABSENT:
        return value is None
    if value is None:
        return False
    if cond.kind == PRESENT:
        return True
    if cond.kind == EQUALS:
        return value == cond.value
    if cond.kind == TYPE:
        return value.kind == cond.type_name
    raise ValueError(f"unknown condition kind {cond.kind!r}")


_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def is_identifier(text: str) -> bool:
    return bool(_IDENT.match(text))
