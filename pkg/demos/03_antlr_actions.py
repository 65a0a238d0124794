"""Generate ANTLR grammars with the actions and predicates from aspects.

Run from anywhere:  python3 demos/03_antlr_actions.py
"""

from _paths import text

from grammatic import apply, parse_aspect, parse_grammar, resolve
from grammatic.backends.antlr import AntlrGenConfig, generate

# The sum rule gets a return value and accumulates each mult into it.
expr = resolve(parse_grammar(text("expr.gr"), "expr.gr"))
store, _ = apply(expr, parse_aspect(text("sum_antlr.aspect"), "sum_antlr.aspect"))
print(generate(expr, store, AntlrGenConfig(grammar_name="Expr")))

# NEWLINE needs a syntactic predicate so that "\r\n" is tried before "\r".
newline = resolve(parse_grammar(text("newline.gr"), "newline.gr"))
store, _ = apply(newline, parse_aspect(text("newline.aspect"), "newline.aspect"))
print(generate(newline, store))
