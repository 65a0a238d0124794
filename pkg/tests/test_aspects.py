import pytest

from conftest import EXPR_GRAMMAR, NEWLINE_ASPECT, NEWLINE_GRAMMAR, load
from grammatic.aspects import apply, describe_target, weave
from grammatic.errors import AspectError, ParseError
from grammatic.metadata import NO_VALUE, AnnotationStore, Id, Str
from grammatic.syntax import parse_aspect


def targets(store):
    return sorted((describe_target(store.node(a.node)), a.name) for a in store)


def test_sum_aspect_attaches_four_attributes(expr, sum_aspect):
    store, report = apply(expr, sum_aspect)
    assert len(store) == 4
    assert targets(store) == [("production", "before"), ("ref mult", "after"),
                              ("ref mult", "after"), ("symbol sum", "returns")]
    assert report.rules[0].matches == 1
    assert store.lookup(expr.lookup("sum").id, "returns") == Id("int")
    prod = expr.lookup("sum").productions[0]
    assert store.lookup(prod.id, "before") == Str("##result = 0;")


def test_reapplying_reports_both_origins(expr, sum_aspect):
    store, _ = apply(expr, sum_aspect)
    with pytest.raises(AspectError) as e:
        apply(expr, sum_aspect, store)
    msg = e.value.diagnostic()
    assert "duplicate attribute 'returns'" in msg
    assert msg.count("sum.aspect:1:") == 2


def test_input_store_unchanged(expr, sum_aspect):
    store = AnnotationStore(expr)
    apply(expr, sum_aspect, store)
    assert len(store) == 0


def test_left_recursive_marker():
    g = load("e : e '+' t ; t : ID ; ID : ['a'--'z'] ;")
    aspect = parse_aspect("#Rec --> #Rec ..;\n[[\n    Rec {\n        leftRecursive;\n    };\n]];\n")
    store, _ = apply(g, aspect)
    assert store.lookup(g.lookup("e").id, "leftRecursive") is NO_VALUE
    assert len(store) == 1


def test_positional_block_targets_matched_node(expr):
    aspect = parse_aspect("#Op --> #Arg (#Sign [[ kind = sign; ]] #Arg)* ;")
    store, _ = apply(expr, aspect)
    assert targets(store) == [("literal '*'", "kind"), ("literal '+'", "kind")]


def test_newline_predicate_lands_on_first_production():
    g = load(NEWLINE_GRAMMAR)
    store, _ = apply(g, parse_aspect(NEWLINE_ASPECT))
    first, second = g.lookup("NEWLINE").productions
    assert store.lookup(first.id, "predicate") == Str("'\\r'? '\\n'")
    assert store.attributes(second.id) == []


def test_zero_matches_warns(expr):
    store, report = apply(expr, parse_aspect("nothing [[ a; ]];"))
    assert len(store) == 0
    assert "matched nothing" in report.warnings[0].message


def test_conflicting_values_in_one_rule(expr):
    aspect = parse_aspect("#S [[ x = 2; ]] --> .. ; [[ S { x = 1; }; ]];")
    with pytest.raises(AspectError, match="conflicting values"):
        apply(expr, aspect)


def test_equal_values_in_one_rule_are_merged(expr):
    aspect = parse_aspect("#S [[ x = 1; ]] --> mult .. ; [[ S { x = 1; }; ]];")
    store, _ = apply(expr, aspect)
    assert targets(store) == [("symbol sum", "x")]


def test_disjoint_aspects_commute(expr, sum_aspect):
    other = parse_aspect("mult [[ returns = int; ]] ;\n@grammar [[ antlrName = Calc; ]];")
    a, _ = weave(expr, [sum_aspect, other])
    b, _ = weave(expr, [other, sum_aspect])
    assert a == b
    assert len(a) == 6


def test_unbound_entry_variable_rejected():
    with pytest.raises(ParseError, match="unbound variable B"):
        parse_aspect("#A --> .. ;\n[[ B { x; }; ]];")


def test_grammar_level_rule(expr):
    store, _ = apply(expr, parse_aspect("@grammar [[ antlrHeader = 'package calc;'; ]];"))
    assert store.lookup(expr.id, "antlrHeader") == Str("package calc;")
