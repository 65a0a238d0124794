import sys

import pytest

from grammatic.syntax import parse_aspect, parse_grammar
from grammatic.templates import resolve

EXPR_GRAMMAR = """\
const : ID '=' sum ';' ;
varDecl : type ID ('=' sum)? ';' ;
type : ID;
sum : mult ('+' mult)* ;
mult : factor ('*' factor)* ;
factor : NUM || ID || '(' sum ')' ;
ALPHA : ['a'--'z' 'A'--'Z' '_'] ;
ID : ALPHA (ALPHA | ['0'--'9'])* ;
NUM : ['0'--'9']+ ;
"""

SUM_ASPECT = """\
sum [[returns = int;]]
    $:--> ..
    [[
        before = '##result = 0;';
        #mult.after = <<
            ##result += #mult;
        >>;
    ]];
"""

NEWLINE_GRAMMAR = "NEWLINE : '\\r'? '\\n' || '\\r';\n"

NEWLINE_ASPECT = """\
NEWLINE
    $:--> ..
    [[
        predicate = <<'\\r'? '\\n'>>;
    ]]
    --> '\\r';
"""

BUILDERS_ASPECT = """\
// Builder metadata for the expression grammar in expr.gr.
// Every rule comes in two flavours: one that builds expression objects
// against a variable scope and one that folds constants in a context.

sum
    [[
        builders = {{
            Expression varSum(Scope scope);
            int constSum(Context context);
        }};
    ]]
    --> mult ..
    [[
        #mult.call = {
            varSum = {{varMult(scope)}};
            constSum = {{constMult(context)}};
        };
    ]];

mult
    [[
        builders = {{
            Expression varMult(Scope scope);
            int constMult(Context context);
        }};
    ]]
    --> factor ..
    [[
        #factor.call = {
            varMult = {{varFactor(scope)}};
            constMult = {{constFactor(context)}};
        };
    ]];

factor
    [[
        builders = {{
            Expression varFactor(Scope scope);
            int constFactor(Context context);
        }};
    ]];

factor --> '(' sum ')'
    [[
        #sum.call = {
            varFactor = {{varSum(scope)}};
            constFactor = {{constSum(context)}};
        };
    ]];
"""

TEMPLATES_GRAMMAR = """\
Symbol binaryOperation<ID $name, Expression $sign, Expression $argument> {
    $name --> $argument ($sign $argument)*;
}

import binaryOperation<Product, '*' | '/', Factor>;
import binaryOperation<Sum, '+' | '-', Product>;
Factor
    --> NUMBER
    || ID
    || '(' Sum ')'
    ;
NUMBER : ['0'--'9']+ ;
ID : ['a'--'z']+ ;
"""

ATTRIBUTE_VALUE_GRAMMAR = """\
Symbol attributeValue<Production* $moreValueTypes> {
    AttributeValue
        --> STRING
        || ID
        || INT
        || Annotation
        || ValueSequence
        || $moreValueTypes
        ;
}

import attributeValue<
    '{{{' Expression '}}}'
>;
STRING : '"' ['a'--'z']* '"' ;
ID : ['a'--'z']+ ;
INT : ['0'--'9']+ ;
Annotation : '@' ID ;
ValueSequence : '{{' AttributeValue* '}}' ;
Expression : ID ;
"""


def load(text, origin="<string>"):
    return resolve(parse_grammar(text, origin))


@pytest.fixture
def expr():
    return load(EXPR_GRAMMAR, "expr.gr")


@pytest.fixture
def sum_aspect():
    return parse_aspect(SUM_ASPECT, "sum.aspect")


def pytest_terminal_summary(terminalreporter):
    results = sys.modules.get("test_acceptance")
    if results is None or not results.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results.RESULTS):
        terminalreporter.write_line(results.RESULTS[number])
