"""Parse a grammar, print it back, and expand templates from another unit.

Run from anywhere:  python3 demos/01_grammar_and_templates.py
"""

from _paths import HERE, text

from grammatic import parse_grammar, print_grammar, resolve
from grammatic.templates import FileLoader

# The expression grammar is an ordinary grammar: no imports, no templates.
unit = parse_grammar(text("expr.gr"), str(HERE / "expr.gr"))
grammar = resolve(unit)
print(f"expr.gr: {len(grammar.symbols)} symbols, "
      f"{sum(len(s.productions) for s in grammar.symbols)} productions")

# The printer is canonical, and what it prints parses back to the same model.
again = resolve(parse_grammar(print_grammar(grammar)))
print("round trip equal:", again.symbols == grammar.symbols)
print()

# calc.gr builds Sum and Product from a template that lives in lib/operators.gr.
# The loader looks next to the importing file first, then on the include path.
calc = resolve(parse_grammar(text("calc.gr"), str(HERE / "calc.gr")),
               FileLoader([HERE / "lib"]))
print("calc.gr after template expansion:")
print(print_grammar(calc))

# Each instantiated node remembers where it came from.
product = calc.lookup("Product")
print("Product defined at", product.span)
