"""Find structure with queries, then attach metadata with an aspect.

Run from anywhere:  python3 demos/02_queries_and_aspects.py
"""

from _paths import text

from grammatic import apply, match, parse_aspect, parse_grammar, resolve
from grammatic.aspects import describe_target
from grammatic.errors import AspectError
from grammatic.metadata import format_value

grammar = resolve(parse_grammar(text("expr.gr"), "expr.gr"))

# Binary operations: a symbol whose only production is an argument followed
# by any number of (sign, argument) pairs.
print("binary operations:")
for b in match(grammar, None, "#Op --> #Arg (#Sign #Arg)* ;"):
    print(f"  {b['Op'].name}: arguments are {b['Arg'].name}, sign {b['Sign'].text!r}")

# Direct left recursion: a production that starts with its own symbol.
left = match(grammar, None, "#Rec --> #Rec .. ;")
print("left-recursive symbols:", [b["Rec"].name for b in left] or "none")
print()

# An aspect is a list of query rules with attribute blocks. Weaving it
# records attributes against the matched nodes; the grammar is untouched.
aspect = parse_aspect(text("sum_antlr.aspect"), "sum_antlr.aspect")
store, report = apply(grammar, aspect)
print(f"{len(report.attachments)} attributes woven:")
for a in report.attachments:
    node = store.node(a.node)
    print(f"  {describe_target(node)}: {a.name} = {format_value(a.value)}")

# Weaving the same aspect twice would give a node two values for one
# attribute, which is reported rather than silently overwritten.
try:
    apply(grammar, aspect, store)
except AspectError as e:
    print("\nsecond application:", e.diagnostic())
