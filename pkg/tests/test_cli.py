# 命令行：退出码与报告内容

import json

import pytest
from click.testing import CliRunner
from jsonschema import Draft202012Validator

from src.cli import cli

from tests.conftest import CORPUS, PROOFS

SCHEMA = CORPUS.parent / "schemas" / "report.schema.json"


@pytest.fixture
def invoke(tmp_path):
    runner = CliRunner()
    config = str(tmp_path / "missing.yaml")

    def run(*args, env=None):
        return runner.invoke(cli, ["--config", config, "--log-level", "CRITICAL", *args], env=env)

    return run


def _corpus(name):
    return str(CORPUS / f"{name}.dth")


class TestCheckAndVerify:
    def test_check_clean_theory(self, invoke):
        result = invoke("check", _corpus("demo"))
        assert result.exit_code == 0
        assert "theory demo: 0 diagnostic(s)" in result.output

    def test_verify_corpus_theory(self, invoke):
        result = invoke("verify", _corpus("handlers"))
        assert result.exit_code == 0, result.output
        assert "[PASS] handled-by-second" in result.output
        assert "try/catch oracle:" in result.output

    def test_verify_reports_wrong_expectation(self, invoke, tmp_path):
        path = tmp_path / "wrong.dth"
        path.write_text(
            "theory wrong exceptions logic EXC\n"
            "exception T of {a}\n"
            "check oops: untag[T] . tag[T] == id[V_T] expect holds\n",
            encoding="utf-8",
        )
        result = invoke("verify", str(path))
        assert result.exit_code == 1
        assert "[FAIL] oops" in result.output
        assert "counterexample on input exn T a" in result.output

    def test_verify_json(self, invoke):
        result = invoke("verify", _corpus("exc_core"), "--json", "--timing")
        assert result.exit_code == 0
        document = json.loads(result.output)
        assert document["schema_version"] == 1
        assert document["command"] == "verify"
        assert document["ok"] is True
        assert "elapsed_seconds" in document
        assert {c["name"] for c in document["checks"]} >= {"untag-tag", "lcopair-catches"}

    def test_verify_unknown_check(self, invoke):
        result = invoke("verify", _corpus("demo"), "--only", "nope")
        assert result.exit_code == 2
        assert "undeclared check 'nope'" in result.output

    def test_syntax_error_is_invalid_input(self, invoke, tmp_path):
        path = tmp_path / "broken.dth"
        path.write_text("theory broken exceptions logic EXC\nexception T of {}", encoding="utf-8")
        result = invoke("check", str(path))
        assert result.exit_code == 2
        assert "error: 2:" in result.output

    def test_carrier_cap_from_environment(self, invoke):
        result = invoke("verify", _corpus("demo"), env={"DECKIT_MAX_CARRIER": "2"})
        assert result.exit_code == 3


class TestEval:
    def test_term_on_input(self, invoke):
        result = invoke("eval", _corpus("demo"), "--term", "half", "--input", "ff")
        assert result.exit_code == 0
        assert "half on ff = exn T a" in result.output

    def test_term_needs_input(self, invoke):
        result = invoke("eval", _corpus("demo"), "--term", "half")
        assert result.exit_code != 0

    def test_statements_over_every_state(self, invoke):
        result = invoke("eval", _corpus("states"), "--json")
        assert result.exit_code == 0
        rows = json.loads(result.output)["results"]
        # update 语句给定了状态，lookup[Y] on () 展开到 4 个状态
        assert len(rows) == 5
        assert rows[0]["output"] == "((), {X=1, Y=0})"

    def test_explicit_state(self, invoke):
        result = invoke("eval", _corpus("states"), "--term", "lookup[X]", "--input", "()",
                        "--state", "{X=1, Y=0}")
        assert result.exit_code == 0
        assert "lookup[X] on ((), {X=1, Y=0}) = (1, {X=1, Y=0})" in result.output


class TestProve:
    def test_accepted_proof(self, invoke):
        result = invoke("prove", _corpus("demo"), "--proof", str(PROOFS / "ax.dpf"))
        assert result.exit_code == 0

    def test_rejected_proof(self, invoke, tmp_path):
        path = tmp_path / "bad.dpf"
        path.write_text("(rule s-refl (concl strong id[Bool] id[V_T]))", encoding="utf-8")
        result = invoke("prove", _corpus("demo"), "--proof", str(path), "--json")
        assert result.exit_code == 1
        document = json.loads(result.output)
        assert document["accepted"] is False
        assert document["rule"] == "s-refl"
        assert document["path"] == []


class TestRulesAndChecks:
    def test_rules_listing(self, invoke):
        result = invoke("rules", "--logic", "eq", "--json")
        assert result.exit_code == 0
        document = json.loads(result.output)
        assert document["profile"] == "EQ"
        assert len(document["rules"]) == 20

    def test_soundness_of_selected_rules(self, invoke):
        result = invoke("soundness", _corpus("exc_core"), "--rules", "s-refl,s-sym",
                        "--samples", "10")
        assert result.exit_code == 0
        assert "2/2 rules sound" in result.output

    def test_witness(self, invoke):
        result = invoke("witness", _corpus("exc_core"), "copair-of-catchers")
        assert result.exit_code == 0
        assert "copair-of-catchers: witness found" in result.output

    def test_compat(self, invoke, tmp_path):
        path = tmp_path / "tiny.dth"
        path.write_text("theory tiny exceptions logic EXC\nexception T of {a, b}\n",
                        encoding="utf-8")
        result = invoke("compat", str(path))
        assert result.exit_code == 0, result.output
        assert "l-pair" in result.output

    def test_compat_on_two_locations(self, invoke):
        result = invoke("compat", _corpus("states"), "--json")
        assert result.exit_code == 0, result.output
        document = json.loads(result.output)
        assert [r["construction"] for r in document["results"]] == ["copair", "l-pair", "r-pair"]
        assert document["results"][0]["checked"] == 4096 ** 2


class TestJsonSchema:
    @pytest.fixture(scope="class")
    def validator(self):
        with open(SCHEMA, "r", encoding="utf-8") as f:
            schema = json.load(f)
        Draft202012Validator.check_schema(schema)
        return Draft202012Validator(schema)

    @pytest.mark.parametrize(
        "args",
        [
            ("check", "demo"),
            ("verify", "handlers"),
            ("verify", "exc_parse", "--timing"),
            ("eval", "states"),
            ("eval", "demo", "--term", "half", "--input", "ff"),
            ("prove", "demo", "--proof", str(PROOFS / "ax.dpf")),
            ("soundness", "exc_core", "--rules", "s-refl,s-sym", "--samples", "10"),
            ("witness", "exc_core", "copair-of-catchers"),
            ("witness", "states", "w-repl-unrestricted", "--samples", "50"),
            ("compat", "states"),
            ("compat", "exc_core"),
        ],
        ids=lambda args: "-".join(args[:2]),
    )
    def test_report_matches_schema(self, invoke, validator, args):
        command, theory, *rest = args
        result = invoke(command, _corpus(theory), *rest, "--json")
        assert result.exit_code in (0, 1), result.output
        document = json.loads(result.output)
        assert document["command"] == command
        validator.validate(document)

    @pytest.mark.parametrize("logic", ["EQ", "EXC_PLUS", "ST_PLUS"])
    def test_rules_listing_matches_schema(self, invoke, validator, logic):
        result = invoke("rules", "--logic", logic, "--json")
        assert result.exit_code == 0
        validator.validate(json.loads(result.output))

    def test_rejected_proof_matches_schema(self, invoke, validator, tmp_path):
        path = tmp_path / "bad.dpf"
        path.write_text("(rule s-refl (concl strong id[Bool] id[V_T]))", encoding="utf-8")
        result = invoke("prove", _corpus("demo"), "--proof", str(path), "--json")
        assert result.exit_code == 1
        validator.validate(json.loads(result.output))
