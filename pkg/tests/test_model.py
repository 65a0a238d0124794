import pytest

from grammatic import model
from grammatic.model import (Alternative, CharClass, Grammar, Iteration, NodeId, Production,
                             Sequence, StringLiteral, Symbol, SymbolRef, alt, seq)


def test_node_ids_are_unique_and_ignored_by_equality():
    a, b = SymbolRef("x"), SymbolRef("x")
    assert a.id != b.id
    assert a == b
    assert model.structural_equals(Sequence((a, StringLiteral("+"))),
                                   Sequence((b, StringLiteral("+"))))


def test_alternative_needs_two_children():
    with pytest.raises(ValueError):
        Alternative((SymbolRef("x"),))


def test_empty_literal_rejected():
    with pytest.raises(ValueError):
        StringLiteral("")


def test_iteration_kind_checked():
    with pytest.raises(ValueError):
        Iteration(SymbolRef("x"), "twice")


def test_char_class_items_are_single_chars():
    with pytest.raises(ValueError):
        CharClass((("ab", None),))


def test_smart_constructors_collapse_singletons():
    x = SymbolRef("x")
    assert seq(x) is x
    assert alt(x) is x
    assert isinstance(seq(x, x), Sequence)


def test_grammar_rejects_duplicate_symbols():
    p = Production(SymbolRef("a"))
    with pytest.raises(ValueError):
        Grammar((Symbol("a", (p,)), Symbol("a", (p,))))


def test_walk_is_preorder_with_parents(expr):
    items = list(model.walk(expr))
    kinds = [i.kind for i in items]
    assert kinds[0] == "symbol"
    assert items[0].parent == expr.id
    by_id = {i.id: i for i in items}
    for item in items[1:]:
        assert item.parent in by_id or item.parent == expr.id
    assert kinds.count("symbol") == 9
    assert kinds.count("production") == 11


def test_walk_ids_unique(expr):
    ids = [i.id for i in model.walk(expr)]
    assert len(ids) == len(set(ids))


def test_lookup_and_references(expr):
    s = expr.lookup("sum")
    assert [r.name for r in model.references(s)] == ["mult", "mult"]
    assert model.lookup(expr, "missing") is None


def test_lexical_classification(expr):
    assert model.lexical_symbols(expr) == {"ALPHA", "ID", "NUM"}


def test_recursive_symbols_are_not_lexical():
    g = Grammar((Symbol("a", (Production(Sequence((StringLiteral("("), SymbolRef("a"),
                                                   StringLiteral(")")))),
                             Production(StringLiteral("x")))),))
    assert model.lexical_symbols(g) == frozenset()


def test_clone_gives_fresh_ids(expr):
    copy = model.clone(expr.lookup("sum"))
    assert copy == expr.lookup("sum")
    old = {i.id for i in model.iter_subtree(expr.lookup("sum"))}
    new = {i.id for i in model.iter_subtree(copy)}
    assert not old & new


def test_kind_of_names():
    assert model.kind_of(SymbolRef("x")) == "ref"
    assert model.kind_of(StringLiteral("x")) == "literal"
    assert model.kind_of(Sequence(())) == "sequence"


def test_node_id_fresh_monotonic():
    a, b = NodeId.fresh(), NodeId.fresh()
    assert a != b
