"""Surface syntax: tokenizer, parsers and the canonical printer."""

from .parser import parse_aspect, parse_grammar, parse_query, parse_value
from .printer import print_expr, print_grammar

__all__ = ["parse_grammar", "parse_aspect", "parse_query", "parse_value",
           "print_grammar", "print_expr"]
