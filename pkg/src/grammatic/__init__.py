"""Grammatic: modular grammar definitions with externally attached metadata."""

from .aspects import apply, weave
from .errors import GrammaticError, SourceSpan
from .metadata import NO_VALUE, AnnotationStore, check_condition
from .model import Grammar, Production, Symbol, lookup, structural_equals, walk
from .query import match, match_expr
from .syntax import parse_aspect, parse_grammar, parse_query, print_grammar
from .templates import instantiate, resolve

__all__ = [
    "GrammaticError", "SourceSpan", "NO_VALUE", "AnnotationStore", "check_condition",
    "Grammar", "Production", "Symbol", "lookup", "structural_equals", "walk",
    "match", "match_expr", "parse_aspect", "parse_grammar", "parse_query",
    "print_grammar", "instantiate", "resolve", "apply", "weave",
]

__version__ = "0.1.0"
