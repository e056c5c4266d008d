import json

import pytest
from click.testing import CliRunner

from cpx.cli import main
from cpx.scenario import corpus_names, corpus_text


@pytest.fixture
def runner():
    return CliRunner()


def _bad_file(tmp_path, text):
    path = tmp_path / "bad.scn"
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_corpus_listing(runner):
    result = runner.invoke(main, ["corpus"])
    assert result.exit_code == 0
    assert result.output.split() == corpus_names()


def test_check_and_print(runner):
    result = runner.invoke(main, ["check", "roof_replacement"])
    assert result.exit_code == 0 and result.output.startswith("ok: Roof replacement")
    printed = runner.invoke(main, ["print", "roof_replacement"]).output
    assert printed.startswith('scenario "Roof replacement"')


def test_run_from_path(runner, tmp_path):
    path = tmp_path / "late.scn"
    path.write_text(corpus_text("late_meeting"), encoding="utf-8")
    result = runner.invoke(main, ["run", str(path), "--format", "csv"])
    assert result.exit_code == 0
    assert "goodness,M_T" in result.output


def test_query_command_with_overrides(runner):
    args = ["speaker", "milk_theft", "--world", "u_CD", "--set", "cost_both=0.6",
            "--format", "json-lines"]
    result = runner.invoke(main, args)
    assert result.exit_code == 0
    recs = [json.loads(line) for line in result.output.splitlines()]
    chosen = {r["col"]: r["value"] for r in recs}
    assert chosen == {"because C=1": 0.5, "because D=1": 0.5, "because C=1 and D=1": 0.0}


def test_beta_override_changes_policy(runner):
    base = runner.invoke(main, ["policy", "roof_replacement", "--format", "csv"]).output
    soft = runner.invoke(main, ["policy", "roof_replacement", "--beta-l", "1",
                                "--format", "csv"]).output
    assert base != soft
    assert "beta-l" not in soft  # provenance only appears in plain output


def test_env_format(runner):
    result = runner.invoke(main, ["payoff", "late_meeting"], env={"CPX_FORMAT": "markdown"})
    assert result.exit_code == 0
    assert result.output.startswith("**payoffs of apologise**")


def test_sweep_command(runner):
    result = runner.invoke(main, ["sweep", "roof_replacement", "beta-l", "0.5,inf", "policy",
                                  "--format", "csv"])
    assert result.exit_code == 0
    assert ",inf," in result.output


def test_cause_def_option(runner):
    result = runner.invoke(main, ["denotation", "roof_replacement", "--cause-def", "butfor",
                                  "--message", "because R=1", "--format", "csv"])
    assert result.exit_code == 0
    assert result.output.splitlines()[1] == "because R=1,1,0,1,0"


def test_parse_error_exits_one(runner, tmp_path):
    result = runner.invoke(main, ["run", _bad_file(tmp_path, "")])
    assert result.exit_code == 1
    assert "1:1" in result.output


def test_validation_error_exits_one(runner, tmp_path):
    text = corpus_text("late_meeting").replace("payoff both      : -1 1", "payoff both : -1")
    result = runner.invoke(main, ["check", _bad_file(tmp_path, text)])
    assert result.exit_code == 1
    assert "(both, M_and)" in result.output


def test_missing_source_exits_one(runner):
    assert runner.invoke(main, ["run", "no_such_scenario"]).exit_code == 1


def test_unknown_world_exits_one(runner):
    assert runner.invoke(main, ["speaker", "late_meeting", "--world", "M_x"]).exit_code == 1


def test_runtime_error_exits_two(runner, tmp_path):
    # with only "because R=1" and no silence, the speaker has nothing to say at M_D
    text = corpus_text("roof_replacement").replace("query", "# query") + "silence off\n"
    for line in ('"because D=1" := cause (D=1)', '"because R=1 and D=1" := cause (R=1, D=1)'):
        text = text.replace(line, "# " + line)
    result = runner.invoke(main, ["pl", _bad_file(tmp_path, text)])
    assert result.exit_code == 2, result.output
    assert "error:" in result.output


def test_bad_beta_is_usage_error(runner):
    result = runner.invoke(main, ["policy", "roof_replacement", "--beta-l", "-1"])
    assert result.exit_code == 2 and "must be >= 0" in result.output
