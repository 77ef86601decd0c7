import json
import os

import pytest
from click.testing import CliRunner

from config import get_settings
from main import cli, run_command

TRANSFER = "!st f:1. ((?n:0. app(f,n) = 0) -> ?st m:0. app(f,m) = 0)\n"
IMPLICATION = ("rel P : 0\n"
               "(?st h:1. !st x:0. P(app(h,x))) -> !st f:1. ((?n:0. app(f,n) = 0) -> ?st m:0. app(f,m) = 0)\n")

@pytest.fixture
def runner():
    return CliRunner()

@pytest.fixture
def write(tmp_path):
    def make(name: str, text: str) -> str:
        path = tmp_path / name
        path.write_text(text, encoding="utf-8")
        return str(path)
    return make

def test_parse_reports_classification(runner, golden_dir):
    result = runner.invoke(cli, ["parse", os.path.join(golden_dir, "curk.txt")])
    assert result.exit_code == 0
    assert "parse: pass (External)" in result.output
    assert "round_trip: pass" in result.output

def test_print_is_canonical(runner, write):
    path = write("t.txt", "!st f:1. ((?n:0. (app(f,n) = 0)) -> ?st m:0. app(f,m) = 0)")
    result = runner.invoke(cli, ["print", path])
    assert result.exit_code == 0
    assert result.output == "!st f:1. (?n:0. app(f,n) = 0) -> ?st m:0. app(f,m) = 0\n"

def test_parse_error_exit_code(runner, write):
    result = runner.invoke(cli, ["parse", write("bad.txt", "!x:0 x = 0\n")])
    assert result.exit_code == 2
    assert "erro:" in result.output

def test_type_error_exit_code(runner, write):
    result = runner.invoke(cli, ["normalize", write("bad.txt", "var f : 1\nf = 0\n")])
    assert result.exit_code == 2

def test_normalize_json(runner, write):
    result = runner.invoke(cli, ["normalize", write("t.txt", TRANSFER), "--format", "json"])
    assert result.exit_code == 0
    report = json.loads(result.output)
    assert [step["rule"] for step in report["trace"]] == ["BoundSearch", "PrenexImpliesSt"]
    assert report["trace"][0]["path"] == "0.1"
    assert report["verdicts"]["replay"]["status"] == "pass"
    assert report["stages"]["normal_form"].endswith(
        "!st f:1. ?st m:0. (?n:0. app(f,n) = 0) -> ?i <= m. app(f,i) = 0\n")

def test_pipeline_json_is_byte_identical(runner):
    argv = ["pipeline", "Pi01G", "--logic", "classical", "--seed", "3", "--format", "json"]
    first = runner.invoke(cli, argv)
    second = runner.invoke(cli, argv)
    assert first.exit_code == 0
    assert first.output == second.output
    assert json.loads(first.output)["seed"] == 3

def test_json_output_is_deterministic(runner, write):
    path = write("t.txt", TRANSFER)
    first = runner.invoke(cli, ["normalize", path, "--logic", "intuitionistic", "--format", "json"])
    second = runner.invoke(cli, ["normalize", path, "--logic", "intuitionistic", "--format", "json"])
    assert first.output == second.output

def test_normalize_outside_fragment(runner, write):
    result = runner.invoke(cli, ["normalize", write("st.txt", "var y : 0\nst(y)\n"), "--format", "json"])
    assert result.exit_code == 1
    report = json.loads(result.output)
    assert report["verdicts"]["normal_form"]["status"] == "fail"

def test_extract(runner, write):
    result = runner.invoke(cli, ["extract", write("t.txt", TRANSFER), "--format", "json"])
    assert result.exit_code == 0
    extraction = json.loads(result.output)["extraction"]
    assert extraction["witnesses"][0]["symbol"] == "t_m"
    assert extraction["witnesses"][0]["recipe"] == "pass-through"
    assert "max(app(t_m,f))" in extraction["collapsed"]

def test_herbrandise_and_meta_reverse(runner, write):
    path = write("h.txt", IMPLICATION)
    herbrand = runner.invoke(cli, ["herbrandise", path, "--format", "json"])
    assert herbrand.exit_code == 0
    assert json.loads(herbrand.output)["herbrandisation"]["o"].startswith("o : ")
    reverse = runner.invoke(cli, ["meta-reverse", path])
    assert reverse.exit_code == 0
    assert "round_trip: pass" in reverse.output

def test_herbrandise_needs_implication(runner, write):
    result = runner.invoke(cli, ["herbrandise", write("t.txt", TRANSFER)])
    assert result.exit_code == 1

def test_catalog_list_and_show(runner):
    listing = runner.invoke(cli, ["catalog", "list"])
    assert listing.exit_code == 0
    assert "OPT\talias\t-> HYP" in listing.output
    shown = runner.invoke(cli, ["catalog", "show", "OPT"])
    assert shown.exit_code == 0
    assert shown.output.startswith("# HYP (Zoo)\n")

def test_catalog_unencoded(runner):
    result = runner.invoke(cli, ["catalog", "show", "FIP"])
    assert result.exit_code == 2

def test_pipeline_with_goldens(runner, golden_dir):
    result = runner.invoke(cli, ["pipeline", "Pi01G", "--golden", golden_dir, "--format", "json"])
    assert result.exit_code == 0
    report = json.loads(result.output)
    assert report["principle"] == "Pi01G"
    assert all(v["status"] == "pass" for v in report["verdicts"].values())
    assert report["timings"] is None

def test_pipeline_seed_from_environment(runner, monkeypatch):
    monkeypatch.setenv("NSZOO_SEED", "42")
    get_settings.cache_clear()
    result = runner.invoke(cli, ["pipeline", "DNR", "--seed", "3", "--format", "json"])
    assert json.loads(result.output)["seed"] == 42

def test_pipeline_text_timings(runner):
    result = runner.invoke(cli, ["pipeline", "DNR", "--timings"])
    assert "[timings]" in result.output
    assert "[trace]" in result.output

def test_model_check_idealisation(runner, tmp_path):
    dump = tmp_path / "dump"
    result = runner.invoke(cli, ["model-check", "rule", "Idealisation", "--seed", "0",
                                 "--dump", str(dump), "--format", "json"])
    assert result.exit_code == 0
    report = json.loads(result.output)
    assert report["verdicts"]["soundness:Idealisation"]["detail"].startswith("expected-counterexample")
    assert (dump / "Idealisation-1.txt").exists()

def test_model_check_unknown_rule(runner):
    result = runner.invoke(cli, ["model-check", "rule", "Nope"])
    assert result.exit_code == 2

def test_model_check_extraction(runner, write):
    result = runner.invoke(cli, ["model-check", "extraction", write("t.txt", TRANSFER), "--size", "2"])
    assert result.exit_code == 0
    assert "extraction: pass" in result.output

@pytest.mark.parametrize("witnesses", ["oracle", "search"])
def test_model_check_extraction_witness_choice(runner, write, witnesses):
    result = runner.invoke(cli, ["model-check", "extraction", write("t.txt", TRANSFER), "--size", "2",
                                 "--witnesses", witnesses])
    assert result.exit_code == 0
    assert "extraction: pass" in result.output

def test_run_command_exit_codes(write):
    assert run_command(["catalog", "show", "FIP"]) == 2
    assert run_command(["no-such-command"]) == 2
    assert run_command(["normalize", write("t.txt", TRANSFER)]) == 0
