import io
import json

import pytest

from gwsd.cli import run
from gwsd.formats import parse

from conftest import GOLDEN


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run([str(a) for a in argv], out, err)
    return code, out.getvalue(), err.getvalue()


def g(name):
    return GOLDEN / name


def test_worlds_census():
    code, out, _ = call("worlds", g("census.ctable"), "--format", "json")
    assert code == 0
    assert len(json.loads(out)["worlds"]) == 24


def test_compose_and_factorize_round_trip(tmp_path):
    code, out, _ = call("compose", g("census.wsd"))
    assert code == 0
    one = tmp_path / "one.wsd"
    one.write_text(out)
    code, out, _ = call("factorize", one)
    assert code == 0 and out.startswith("5 components (attribute level)")


def test_factorize_relation():
    code, out, _ = call("factorize", g("three-factors.rel"))
    assert code == 0 and out.startswith("3 factors")


def test_translate():
    code, out, _ = call("translate", "gwsd-to-x", g("one-comp.gwsd"))
    assert code == 0 and parse(out).kind == "xmultitable"
    code, out, _ = call("translate", "c-to-gwsd", g("theta.ctable"), "--simplify")
    assert code == 0 and parse(out).kind == "gwsd"


def test_eval():
    code, out, _ = call("eval", "project[A](R)", g("four-worlds.wsd"), "--format", "json")
    assert code == 0
    assert json.loads(out)


def test_decide_verdict_words():
    code, out, _ = call("decide", "tuple-certain", g("three-comp.gwsd"), "R", "(1)")
    assert code == 0 and out.strip() == "certain (ptime)"
    code, out, _ = call("decide", "empty-world", g("x3c.wsd"), "--witness")
    assert code == 0 and out.startswith("possible (brute-force)")
    code, out, _ = call("decide", "instance-possible", g("x3c-instance.wsd"),
                        g("x3c-instance.world"))
    assert out.strip() == "possible (brute-force)"


def test_decide_query_problem():
    code, out, _ = call("decide", "tuple-q-poss", g("3cnf.wsd"),
                        "{true} - project[](S - R)", "(true)")
    assert code == 0 and out.startswith("possible")


def test_encode_then_decide(tmp_path):
    code, out, _ = call("encode", "3dnf", "--clauses", "1,2,3;1,-2,4;-1,2,-4")
    assert code == 0
    f = tmp_path / "dnf.wsd"
    f.write_text(out)
    assert parse(out).payload == parse(g("3dnf.wsd").read_text()).payload
    q = next(l for l in out.splitlines() if l.startswith("# query:"))[len("# query: "):]
    code, out, _ = call("decide", "tuple-q-cert", f, q, "(true)")
    assert out.startswith("not certain")


def test_errors_exit_one(tmp_path):
    bad = tmp_path / "bad.wsd"
    bad.write_text("gwsd {\n  component (R.d1.A) { (1)\n}")
    code, _, err = call("worlds", bad)
    assert code == 1 and "line 1, column 6" in err
    code, _, err = call("decide", "tuple-certain", g("census.wsd"), "R", "(1, Smith, 185)")
    assert code == 1
    code, _, _ = call("worlds", tmp_path / "missing.wsd")
    assert code == 1


def test_budget_error_reported():
    code, _, err = call("worlds", g("one-comp.gwsd"), "--budget-fresh", "1")
    assert code == 1 and "fresh" in err


def test_usage_error_exit_two():
    assert call("frobnicate")[0] == 2
