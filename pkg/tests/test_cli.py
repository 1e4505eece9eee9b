import io
import json
import subprocess
import sys

import pytest

from afflang.cli import main, repl
from afflang.corpus import source
from afflang.program import prelude_env


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def prelude_file(tmp_path):
    path = tmp_path / "prelude.aff"
    path.write_text(source("prelude.aff"))
    return path


def test_check_prelude(prelude_file):
    code, out, err = run("check", str(prelude_file), "--no-prelude")
    assert code == 0 and err == ""
    assert "Plus : Nat -o Nat -o Nat" in out.splitlines()
    assert "Dup! : !t -o !t * !t" in out.splitlines()


def test_check_reports_contraction(tmp_path):
    path = tmp_path / "bad.aff"
    path.write_text("def ok : 1 = tt\ndef bad : 1 -o 1 * 1 = \\w. w (*) w\n")
    code, out, err = run("check", str(path))
    assert code == 1
    assert out == "ok : 1\n"
    assert f"{path}:2:34: error: UnboundVariable (rule Var)" in err
    assert "variable w" in err


def test_check_empty_file(tmp_path):
    path = tmp_path / "empty.aff"
    path.write_text("")
    assert run("check", str(path)) == (0, "", "")


def test_check_parse_error(tmp_path):
    path = tmp_path / "broken.aff"
    path.write_text("def x : 1 =\n")
    code, out, err = run("check", str(path))
    assert code == 1 and "ParseError" in err and out == ""


def test_check_json(tmp_path):
    path = tmp_path / "two.aff"
    path.write_text("def k : a -o b -o a = \\x. \\y. x\ndef bad : 1 = tt tt\n")
    code, out, _ = run("check", str(path), "--json")
    report = json.loads(out)
    assert code == 1 and report["schema"] == 1 and report["ok"] is False
    k, bad = report["declarations"]
    assert k["ok"] and k["type"] == "a -o b -o a" and k["unused"] == ["y"]
    assert k["trace"]["rule"] == "LolliI"
    assert bad["error"]["class"] == "ShapeMismatch" and bad["error"]["rule"] == "LolliE"


def test_check_trace_and_warnings(tmp_path):
    path = tmp_path / "k.aff"
    path.write_text("def k : a -o b -o a = \\x. \\y. x\n")
    code, out, err = run("check", str(path), "--trace", "--warn-unused")
    assert code == 0
    assert "LolliI: . \\ . |- \\x. \\y. x : a -o b -o a" in out
    assert "warning: k discards unused y" in err


def test_check_missing_file(tmp_path):
    code, _, err = run("check", str(tmp_path / "nope.aff"))
    assert code == 2 and "cannot read" in err


def test_infer():
    assert run("infer", "-e", "\\x. x") == (0, "a -o a\n", "")
    assert run("infer", "-e", "Zero") == (0, "Nat\n", "")
    code, _, err = run("infer", "-e", "fst")
    assert code == 1 and "ParseError" in err
    code, out, _ = run("infer", "-e", "\\w. tt", "--json")
    data = json.loads(out)
    assert data["schema"] == 1 and data["type"] == "a -o 1"


def test_infer_without_prelude():
    code, _, err = run("infer", "-e", "Zero", "--no-prelude")
    assert code == 1 and "UnknownName" in err


def test_eval():
    expr = "Plus (Succ Zero) (Succ (Succ Zero))"
    assert run("eval", "-e", expr, "--nat") == (0, "3\n", "")
    assert run("eval", "-e", "!Zero", "--take", "2", "--nat") == (0, "[0, 0]\n", "")
    code, out, err = run("eval", "-e", "tt tt")
    assert code == 1 and out == "" and "ShapeMismatch" in err
    code, _, err = run("eval", "-e", expr, "--nat", "--fuel", "5")
    assert code == 1 and "FuelExhausted" in err


def test_usage_errors():
    assert run()[0] == 2
    assert run("frobnicate")[0] == 2
    assert run("eval", "-e", "tt", "--fuel", "0")[0] == 2
    assert run("eval", "-e", "tt", "--take", "-1")[0] == 2


def test_repl():
    lines = "\n".join([
        ":t \\x. x",
        "tt",
        ":def two : Nat = Succ (Succ Zero)",
        "Plus two two",
        ":trace on",
        ":t tt",
        ":trace maybe",
        ":t \\w. w w",
        ":bogus",
        ":q",
        "never reached",
    ]) + "\n"
    out = io.StringIO()
    assert repl(prelude_env(), io.StringIO(lines), out, prompt="") == 0
    shown = out.getvalue().splitlines()
    assert shown[0] == "a -o a"
    assert shown[1] == "tt"
    assert shown[2] == "two : Nat"
    assert shown[3].startswith("fold (inr")
    assert shown[4] == "1"
    assert shown[5] == "OneI: . \\ . |- tt : 1"
    assert shown[6] == "usage: :trace on|off"
    assert "UnboundVariable" in shown[7]
    assert shown[8] == "unknown command :bogus"
    assert len(shown) == 9


def test_repl_end_of_input():
    assert repl(prelude_env(), io.StringIO(""), io.StringIO(), prompt="") == 0


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "afflang.cli", "infer", "-e", "Succ"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "Nat -o Nat\n"
