"""Generate a parser that calls builder interfaces instead of building ASTs.

Run from anywhere:  python3 demos/04_builders.py
"""

from _paths import text

from grammatic import apply, parse_aspect, parse_grammar, resolve
from grammatic.backends.builders import generate_builders

expr = resolve(parse_grammar(text("expr.gr"), "expr.gr"))
store, _ = apply(expr, parse_aspect(text("builders.aspect"), "builders.aspect"))

warnings = []
grammar_text, interfaces = generate_builders(expr, store, diagnostics=warnings)

# One ANTLR rule per builder signature; sum alone becomes varSum and constSum.
print(grammar_text)

# Parser symbols without builders (const, varDecl, type) are skipped with a
# warning; lexical symbols carry over as plain lexer rules.
for w in warnings:
    print(w)
print()

# Every signature also gets a Java interface, and IBuilders hands them out.
for name, source in interfaces:
    if name in ("IVarSumBuilder", "IBuilders"):
        print(f"// {name}.java")
        print(source)
