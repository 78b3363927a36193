import json

import pytest
from click.testing import CliRunner

from grig import cli
from grig.words import equal, parse


@pytest.fixture()
def runner():
    return CliRunner()


def run(runner, *args):
    return runner.invoke(cli.main, list(args), catch_exceptions=False)


def test_reduce_verb(runner):
    r = run(runner, "reduce", "bcbc")
    assert r.exit_code == 0
    assert json.loads(r.output) == {"word": ""}


def test_conj_verb_and_exit_codes(runner):
    r = run(runner, "conj", "a", "a")
    assert r.exit_code == 0
    assert json.loads(r.output) == {
        "conjugate": True,
        "level": 0,
        "witness_cosets": ["z0", "z3", "z4", "z7"],
        "depth_used": 6,
    }
    r = run(runner, "conj", "b", "c")
    assert r.exit_code == 1
    assert json.loads(r.output)["conjugate"] is False


def test_input_error_exit_code(runner):
    r = run(runner, "reduce", "abq")
    assert r.exit_code == 2


def test_resource_guard_exit_code(runner):
    r = run(runner, "quotient", "enumerate", "--depth", "8")
    assert r.exit_code == 3
    r = run(runner, "km-coset", "d", "--level", "9")
    assert r.exit_code == 3


def test_quotient_enumerate(runner):
    r = run(runner, "quotient", "enumerate", "--depth", "3")
    assert r.exit_code == 0
    assert json.loads(r.output) == {"depth": 3, "order": 128}


def test_word_verbs_round_trip(runner):
    # every word printed re-parses to an equal element
    outputs = [
        (run(runner, "reduce", "(ab)^2"), parse("(ab)^2")),
        (run(runner, "mul", "ab", "ba"), parse("")),
        (run(runner, "inv", "ad"), parse("da")),
        (run(runner, "section", "b", "1"), parse("c")),
    ]
    for result, expected in outputs:
        assert result.exit_code == 0
        word = json.loads(result.output)["word"]
        assert equal(parse(word), expected)


def test_act_and_order_and_coset(runner):
    assert json.loads(run(runner, "act", "a", "01").output) == {"vertex": "11"}
    assert json.loads(run(runner, "order", "ad").output) == {"order": 4}
    assert json.loads(run(runner, "coset", "ab").output) == {
        "coset": "z15",
        "index": 15,
    }


def test_km_coset_verb(runner):
    r = run(runner, "km-coset", "d", "--level", "1")
    body = json.loads(r.output)
    assert body["descriptor"]["children"] == [
        {"level": 0, "z": 0},
        {"level": 0, "z": 8},
    ]


def test_conj_sub_verb(runner):
    r = run(runner, "conj-sub", "b", "aba",
            "--subgroup-gens", "b,c,d,aba,aca,ada", "--km-level", "0")
    assert r.exit_code == 1
    assert json.loads(r.output)["conjugate"] is False


def test_qfin_verb(runner):
    r = run(runner, "qfin", "d", "d", "--depth", "6")
    assert json.loads(r.output)["cosets"] == [
        "z0", "z1", "z4", "z5", "z8", "z9", "z12", "z13",
    ]


def test_stabilize_verb(runner):
    r = run(runner, "stabilize", "d", "d", "--max-depth", "14")
    body = json.loads(r.output)
    assert body["within_bound"] is True


def test_splitting_tree_dot_file(runner, tmp_path):
    out = tmp_path / "tree.dot"
    r = run(runner, "splitting-tree", "b", "b", "--depth", "5", "--out", str(out))
    assert r.exit_code == 0
    body = json.loads(r.output)
    assert body["dot_file"] == str(out)
    assert out.read_text().startswith("digraph")


def test_verify_verb(runner):
    r = run(runner, "verify", "lift-table")
    assert r.exit_code == 0
    body = json.loads(r.output)
    assert body["passed"] is True
    assert "32/32" in body["details"]["summary"]


def test_verify_schreier_dot_out(runner, tmp_path):
    out = tmp_path / "schreier.dot"
    r = run(runner, "verify", "schreier", "--out", str(out))
    assert r.exit_code == 0
    assert out.read_text().startswith("digraph schreier")


def test_pretty_flag(runner):
    r = run(runner, "--pretty", "reduce", "bc")
    assert r.exit_code == 0
    assert r.output.startswith("{\n")
