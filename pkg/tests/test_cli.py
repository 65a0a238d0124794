import json
import subprocess
import sys

import pytest

from conftest import BUILDERS_ASPECT, EXPR_GRAMMAR, SUM_ASPECT
from grammatic.cli import main


@pytest.fixture
def files(tmp_path):
    (tmp_path / "expr.gr").write_text(EXPR_GRAMMAR)
    (tmp_path / "sum.aspect").write_text(SUM_ASPECT)
    (tmp_path / "builders.aspect").write_text(BUILDERS_ASPECT)
    (tmp_path / "bad.aspect").write_text("sum [[ returns = ; ]]\n")
    return tmp_path


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_check(files, capsys):
    assert run(capsys, "check", files / "expr.gr") == (0, "9 symbols, 11 productions\n", "")


def test_resolve_prints_canonical_grammar(files, capsys):
    code, out, _ = run(capsys, "resolve", files / "expr.gr")
    assert code == 0
    assert out.splitlines()[3] == "sum : mult ('+' mult)* ;"


def test_query_lines(files, capsys):
    code, out, _ = run(capsys, "query", "-e", "#Op --> #Arg (#Sign #Arg)* ;", files / "expr.gr")
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 2
    assert lines[0].startswith("Op=symbol:") and " Arg=ref:" in lines[0]
    assert f"{files / 'expr.gr'}:4:1" in lines[0]


def test_query_json(files, capsys):
    code, out, _ = run(capsys, "query", "-e", "#Rec --> #Rec .. ;", files / "expr.gr",
                       "--format", "json")
    assert code == 0 and json.loads(out) == {"bindings": []}
    code, out, _ = run(capsys, "query", "-e", "#Op --> #Arg (#Sign #Arg)* ;",
                       files / "expr.gr", "--format", "json")
    data = json.loads(out)
    assert [b["symbol"] for b in data["bindings"]] == ["sum", "mult"]
    assert data["bindings"][0]["variables"]["Sign"][0]["text"] == "+"


def test_weave_report(files, capsys):
    code, out, _ = run(capsys, "weave", files / "expr.gr", "--aspect", files / "sum.aspect")
    assert code == 0
    assert out.splitlines()[-1] == "4 attributes from 1 rule"


def test_weave_twice_is_an_input_error(files, capsys):
    code, out, err = run(capsys, "weave", files / "expr.gr", files / "sum.aspect",
                         files / "sum.aspect")
    assert code == 1 and out == ""
    assert ": error: duplicate attribute 'returns'" in err


def test_gen_antlr_writes_file(files, capsys):
    out_dir = files / "out"
    code, out, _ = run(capsys, "gen-antlr", files / "expr.gr", "--aspect", files / "sum.aspect",
                       "-o", out_dir)
    assert code == 0
    assert (out_dir / "Expr.g").read_text().startswith("grammar Expr;\n")


def test_gen_antlr_grammar_name(files, capsys):
    run(capsys, "gen-antlr", files / "expr.gr", "-o", files / "o", "--grammar-name", "Calc")
    assert (files / "o" / "Calc.g").exists()


def test_bad_aspect_reports_position_and_writes_nothing(files, capsys):
    out_dir = files / "out"
    code, out, err = run(capsys, "gen-antlr", files / "expr.gr", "--aspect",
                         files / "bad.aspect", "-o", out_dir)
    assert code == 1 and out == ""
    assert err.startswith(f"{files / 'bad.aspect'}:1:18: error:")
    assert not out_dir.exists()


def test_gen_builders(files, capsys):
    out_dir = files / "b"
    code, out, err = run(capsys, "gen-builders", files / "expr.gr", "--aspect",
                         files / "builders.aspect", "-o", out_dir)
    assert code == 0
    names = sorted(p.name for p in out_dir.iterdir())
    assert "IBuilders.java" in names and "Expr.g" in names and len(names) == 8
    assert err.count(": warning: ") == 3


def test_missing_file(files, capsys):
    code, _, err = run(capsys, "check", files / "nope.gr")
    assert code == 1 and "cannot read file" in err


def test_syntax_error_diagnostic(files, capsys):
    (files / "broken.gr").write_text("a : 'x' \n")
    code, _, err = run(capsys, "check", files / "broken.gr")
    assert code == 1
    assert err.startswith(f"{files / 'broken.gr'}:")
    assert ": error: " in err


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as e:
        main(["query", "x.gr"])
    assert e.value.code == 1


def test_internal_error_exit_code(files, capsys, monkeypatch):
    import grammatic.cli as cli

    def boom(*a):
        raise RuntimeError("bug")
    monkeypatch.setitem(cli.COMMANDS, "check", boom)
    code, _, err = run(capsys, "check", files / "expr.gr")
    assert code == 2 and "internal error" in err


def test_repeated_runs_are_identical(files, capsys):
    outs = set()
    for i in range(3):
        run(capsys, "gen-builders", files / "expr.gr", "--aspect", files / "builders.aspect",
            "-o", files / f"r{i}")
        outs.add(tuple((p.name, p.read_bytes()) for p in sorted((files / f"r{i}").iterdir())))
    assert len(outs) == 1


def test_module_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "grammatic", "check", str(files / "expr.gr")],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "9 symbols, 11 productions\n"
