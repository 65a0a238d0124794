import pytest

from conftest import ATTRIBUTE_VALUE_GRAMMAR, TEMPLATES_GRAMMAR, load
from grammatic.errors import ResolveError, TemplateError
from grammatic.model import walk
from grammatic.syntax import parse_grammar, print_grammar
from grammatic.templates import FileLoader, instantiate, resolve


def body(text):
    (rule,) = parse_grammar(text).rules
    return rule.productions


def test_binary_operation_instances():
    g = load(TEMPLATES_GRAMMAR)
    assert [s.name for s in g.symbols][:3] == ["Product", "Sum", "Factor"]
    assert g.lookup("Sum").productions == body("Sum : Product (('+'|'-') Product)* ;")
    assert g.lookup("Product").productions == body("Product : Factor (('*'|'/') Factor)* ;")


def test_production_star_placeholder_expands_in_place():
    g = load(ATTRIBUTE_VALUE_GRAMMAR)
    prods = g.lookup("AttributeValue").productions
    assert len(prods) == 6
    assert prods[5] == body("x : '{{{' Expression '}}}' ;")[0]


def test_production_star_with_several_productions():
    text = ATTRIBUTE_VALUE_GRAMMAR.replace("'{{{' Expression '}}}'",
                                           "'{{{' Expression '}}}' || '@@'")
    assert len(load(text).lookup("AttributeValue").productions) == 7


def test_instances_get_fresh_ids():
    g = load(TEMPLATES_GRAMMAR)
    ids = [i.id for i in walk(g)]
    assert len(ids) == len(set(ids))


def test_wrong_arity():
    tpl = parse_grammar(TEMPLATES_GRAMMAR).templates[0]
    with pytest.raises(TemplateError, match="takes 3 arguments"):
        instantiate(tpl, [body("x : A ;")[0:1]])


def test_name_argument_must_be_a_name():
    text = TEMPLATES_GRAMMAR.replace("import binaryOperation<Sum,", "import binaryOperation<'s',")
    with pytest.raises(TemplateError, match="single name"):
        load(text)


def test_undeclared_placeholder():
    with pytest.raises(TemplateError, match="undeclared"):
        load("Symbol t<ID $a> { $a : $b ; }\nimport t<X>;\nX : 'x';")


def test_production_placeholder_inside_expression():
    with pytest.raises(TemplateError):
        load("Symbol t<Production $p> { S : 'a' $p ; }\nimport t<'x'>;")


def test_inline_expression_template():
    g = load("Expression pair<Expression $x> { $x ',' $x ; }\nS : '(' pair<ID> ')' ;\n"
             "ID : ['a'--'z'] ;")
    assert print_grammar(g).startswith("S : '(' (ID ',' ID) ')' ;")


def test_recursive_inline_template():
    with pytest.raises(ResolveError, match="recursive"):
        load("Expression r<Expression $x> { r<$x> ; }\nS : r<'a'> ;")


def test_import_cycle(tmp_path):
    (tmp_path / "a.gr").write_text("import b;\nA : B ;\n")
    (tmp_path / "b.gr").write_text("import a;\nB : 'b' ;\n")
    root = parse_grammar((tmp_path / "a.gr").read_text(), str(tmp_path / "a.gr"))
    with pytest.raises(ResolveError, match="import cycle: a -> b -> a"):
        resolve(root, FileLoader())


def test_diamond_import_contributes_once(tmp_path):
    (tmp_path / "base.gr").write_text("Base : 'x' ;\n")
    (tmp_path / "left.gr").write_text("import base;\nL : Base ;\n")
    (tmp_path / "right.gr").write_text("import base;\nR : Base ;\n")
    root = parse_grammar("import left;\nimport right;\nS : L R ;\n", str(tmp_path / "main.gr"))
    g = resolve(root, FileLoader())
    assert [s.name for s in g.symbols] == ["Base", "L", "R", "S"]


def test_include_path(tmp_path):
    lib = tmp_path / "lib"
    lib.mkdir()
    (lib / "tokens.gr").write_text("ID : ['a'--'z']+ ;\n")
    root = parse_grammar("import tokens;\nS : ID ;\n", str(tmp_path / "main.gr"))
    assert resolve(root, FileLoader([lib])).lookup("ID") is not None


def test_missing_import():
    with pytest.raises(ResolveError, match="cannot find unit"):
        resolve(parse_grammar("import nowhere;\nS : 'x' ;\n"), {})


def test_duplicate_symbol_across_units():
    units = {"other": parse_grammar("S : 'y' ;")}
    with pytest.raises(ResolveError, match="defined twice"):
        resolve(parse_grammar("import other;\nS : 'x' ;\n"), units)


def test_template_rule_extended_by_plain_rule():
    g = load("Symbol t<ID $n> { $n : 'a' ; }\nimport t<S>;\nS : 'b' ;")
    assert len(g.lookup("S").productions) == 2


def test_unresolved_reference():
    with pytest.raises(ResolveError, match="unresolved symbol references: missing"):
        load("S : missing ;")


def test_empty_grammar():
    with pytest.raises(ResolveError):
        load("")
