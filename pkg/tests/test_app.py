import json
from fractions import Fraction

import pytest
from pydantic import ValidationError
from typer.testing import CliRunner

from app import app
from modules.config import RunConfig, Subcommand, parse_squares
from modules.instances import EXAMPLE_2_2
from modules.parser import print_polynomial
from tests.test_exactla import A
from tests.test_gram import SPLIT_NAMES

runner = CliRunner()


def run(*args):
    return runner.invoke(app, list(args))


@pytest.fixture
def write(tmp_path):
    def make(name, text):
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)

    return make


def test_verify_builtins():
    result = run("verify", "--builtin", "example-2.2")
    assert result.exit_code == 0
    assert "s = 8" in result.output
    assert "valid: yes" in result.output
    assert run("verify", "--builtin", "example-2.1").exit_code == 0
    assert "s = 4" in run("verify", "--builtin", "example-2.1").output


def test_verify_malformed_file(write):
    result = run("verify", "--file", write("bad.txt", "vars: n=2\np1 = x1 +\n"))
    assert result.exit_code == 2
    assert "parse error" in result.output


def test_verify_missing_file(tmp_path):
    assert run("verify", "--file", str(tmp_path / "absent.txt")).exit_code == 2


def test_verify_reports_first_mismatch(write, example_2_2):
    result = run("verify", "--file", write("bad.txt", "vars: n=1\np1 = x1^2\ng = 2*x1^4\n"))
    assert result.exit_code == 1
    assert "first mismatch: coefficient of x1^4: g has 2, sum of squares has 1" in result.output
    perturbed = EXAMPLE_2_2 + f"g = {print_polynomial(example_2_2.g)} + x5^4\n"
    result = run("verify", "--file", write("perturbed.txt", perturbed))
    assert result.exit_code == 1
    assert "first mismatch: coefficient of x5^4: g has 1, sum of squares has 0" in result.output


def test_dual_prints_the_block_matrix():
    result = run("dual", "--builtin", "example-2.2", "--no-timings")
    assert result.exit_code == 0
    lines = result.output.splitlines()
    assert "dim E = 2" in lines
    assert f"basis matrix 1, nonzero block on [{', '.join(SPLIT_NAMES[:10])}]:" in lines
    for row in A:
        assert "  " + " ".join(str(v).rjust(2) for v in row) in lines
    assert "basis matrix 2, nonzero block on [x5^2]:" in lines
    assert "kernel dimension: 8" in lines
    assert "verdict: pinned" in lines


def test_dual_under_lex_order():
    result = run("dual", "--builtin", "example-2.2", "--order", "lex", "--no-timings")
    assert result.exit_code == 0
    lines = result.output.splitlines()
    for row in A:
        assert "  " + " ".join(str(v).rjust(2) for v in row) in lines
    assert "verdict: pinned" in lines


def test_dual_without_certificate(write):
    result = run("dual", "--file", write("full.txt", "vars: n=2\np1 = x1\np2 = x2\n"))
    assert result.exit_code == 3
    assert "dim E = 0" in result.output


def test_dual_json_round_trips():
    result = run("dual", "--builtin", "example-2.2", "--format", "json")
    assert result.exit_code == 0
    report = json.loads(result.output)
    stage1 = report["stage1"]
    assert stage1["space_dimension"] == 2
    assert stage1["kernel_dimension"] == 8
    assert stage1["verdict"] == "pinned"
    assert stage1["psd_parameters"] == ["1", "1"]
    for matrix in stage1["space_basis"] + [stage1["psd_element"]]:
        assert all(isinstance(Fraction(x), Fraction) for row in matrix["entries"] for x in row)
    assert len(stage1["kernel_basis"]) == 8
    assert all(isinstance(Fraction(x), Fraction) for v in stage1["kernel_basis"] for x in v)


def test_reports_are_deterministic():
    args = ("dual", "--builtin", "example-2.2", "--format", "json", "--no-timings")
    assert run(*args).output == run(*args).output


def test_report_to_file(tmp_path):
    out = tmp_path / "report.json"
    result = run("verify", "--builtin", "example-2.1", "--format", "json", "--out", str(out))
    assert result.exit_code == 0
    assert result.output == ""
    assert json.loads(out.read_text(encoding="utf-8"))["s"] == 4


def test_certify_eight_squares():
    result = run("certify", "--builtin", "example-2.2", "--squares", "8", "--format", "json")
    assert result.exit_code == 0
    (stage2,) = json.loads(result.output)["stage2"]
    assert stage2["verdict"] == "witness-found"
    assert stage2["unknowns"] == 36
    assert {k for k, v in stage2["witness"].items() if v != "0"} == {f"u{i}{i}" for i in range(1, 9)}
    assert len(stage2["ansatz"]) == 8
    assert stage2["ansatz"][7] == "u88*x4*x5"


def test_certify_single_square(write):
    result = run("certify", "--file", write("x1.txt", "vars: n=1\np1 = x1^2\n"), "--squares", "1")
    assert result.exit_code == 0
    assert "verdict: witness-found" in result.output
    assert "  f1 = u11*x1^2" in result.output.splitlines()


def test_certify_budget_exhausted():
    result = run("certify", "--builtin", "example-2.2", "--squares", "7", "--max-pairs", "1", "--no-timings")
    assert result.exit_code == 4
    assert "verdict: budget-exhausted" in result.output


def test_certify_unpinned_is_inconclusive(write):
    result = run("certify", "--file", write("two.txt", "vars: n=2\np1 = x1^2\np2 = x2^2\n"), "--squares", "1..2")
    assert result.exit_code == 3
    assert "verdict: inconclusive" in result.output
    assert "verdict: witness-found" in result.output


@pytest.mark.slow
def test_certify_seven_squares():
    result = run("certify", "--builtin", "example-2.2", "--squares", "7")
    assert result.exit_code == 0
    assert "Groebner basis (1 element): {1}" in result.output
    assert "g is not a sum of 7 squares" in result.output


@pytest.mark.parametrize(
    "args",
    [
        ("verify",),
        ("verify", "--builtin", "example-9"),
        ("verify", "--builtin", "example-2.1", "--file", "x.txt"),
        ("certify", "--builtin", "example-2.2", "--squares", "8..6"),
        ("certify", "--builtin", "example-2.2", "--squares", "8", "--max-pairs", "0"),
    ],
)
def test_option_errors(args):
    assert run(*args).exit_code == 2


def test_parse_squares():
    assert parse_squares("7") == [7]
    assert parse_squares("6..8") == [6, 7, 8]
    for bad in ("0", "8..6", "x", "1..2..3"):
        with pytest.raises(ValueError):
            parse_squares(bad)


def test_run_config():
    cfg = RunConfig(subcommand=Subcommand.CERTIFY, builtin="example-2.2", squares=[8, 7, 8])
    assert cfg.squares == [7, 8]
    assert cfg.budget.max_pairs == 200_000
    with pytest.raises(ValidationError):
        RunConfig(subcommand=Subcommand.CERTIFY, builtin="example-2.2")
    with pytest.raises(ValidationError):
        RunConfig(subcommand=Subcommand.VERIFY, builtin="example-2.3")
