from __future__ import annotations

import json

import pytest
from click.testing import CliRunner

from voi_workbench.cli import main
from tests.conftest import MODELS_DIR

FOOTBALL = str(MODELS_DIR / "football.json")
PRIOR = str(MODELS_DIR / "football_prior.json")
EXTENSION = str(MODELS_DIR / "football_extension.json")


@pytest.fixture
def runner():
    return CliRunner()


class TestEval:
    def test_football_goldens(self, runner):
        result = runner.invoke(main, ["eval", FOOTBALL, "--format", "json"])
        assert result.exit_code == 0
        payload = json.loads(result.stdout)
        assert abs(payload["marginals"]["Win"]["yes"] - 0.53) <= 1e-9
        assert abs(payload["expected_utilities"]["Bet"] - 300.0) <= 1e-9
        assert payload["optimal"] == "Bet"
        assert payload["tie"] is False

    def test_text_output_mentions_optimal(self, runner):
        result = runner.invoke(main, ["eval", FOOTBALL])
        assert result.exit_code == 0
        assert "optimal: Bet" in result.stdout

    def test_missing_file_exits_1(self, runner):
        result = runner.invoke(main, ["eval", "no-such-model.json"])
        assert result.exit_code == 1
        assert "no-such-model.json" in result.stderr

    def test_unknown_flag_exits_2(self, runner):
        result = runner.invoke(main, ["eval", FOOTBALL, "--frobnicate"])
        assert result.exit_code == 2


class TestValidate:
    def test_valid_model(self, runner):
        result = runner.invoke(main, ["validate", FOOTBALL])
        assert result.exit_code == 0
        assert result.stdout.strip() == "ok"

    def test_invalid_model_exits_1_with_diagnostics(self, runner, tmp_path):
        bad = json.loads(open(FOOTBALL).read())
        bad["chance"][0]["table"][""]["yes"] = 0.9  # row sums to 1.3
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(bad))
        result = runner.invoke(main, ["validate", str(path)])
        assert result.exit_code == 1
        assert "row-not-normalized" in result.stderr


class TestVoi:
    def test_conditioning_events_json(self, runner):
        result = runner.invoke(
            main, ["voi", FOOTBALL, "--observe", "Sus,Field,Bonus", "--format", "json"]
        )
        assert result.exit_code == 0
        payload = json.loads(result.stdout)
        assert abs(payload["vpi"] - 144.0) <= 1e-9

    def test_csv_table(self, runner):
        result = runner.invoke(
            main, ["voi", FOOTBALL, "--observe", "Bonus", "--format", "csv"]
        )
        assert result.exit_code == 0
        lines = result.stdout.strip().split("\n")
        assert lines[0] == "outcome,probability,best_alternative,conditional_eu"

    def test_unknown_variable_names_the_offender(self, runner):
        result = runner.invoke(main, ["voi", FOOTBALL, "--observe", "Sus,Moon"])
        assert result.exit_code == 1
        assert "Moon" in result.stderr


class TestFocus:
    def test_recommends_refining_the_football_prior(self, runner):
        result = runner.invoke(
            main,
            ["focus", PRIOR, "--cluster", "p(Win=yes)", "--seed", "0", "--format", "json"],
        )
        assert result.exit_code == 0
        payload = json.loads(result.stdout)
        assert payload["recommend"] is True
        assert payload["total_cost"] == 50.0
        assert payload["seed"] == 0

    def test_json_output_is_byte_identical_across_runs(self, runner):
        args = ["focus", PRIOR, "--cluster", "p(Win=yes)", "--samples", "2000",
                "--seed", "7", "--format", "json"]
        out1 = runner.invoke(main, args).stdout
        out2 = runner.invoke(main, args).stdout
        assert out1 == out2

    def test_seed_from_environment(self, runner):
        args = ["focus", PRIOR, "--cluster", "p(Win=yes)", "--samples", "2000", "--format", "json"]
        via_env = runner.invoke(main, args, env={"VOI_WORKBENCH_SEED": "7"})
        via_flag = runner.invoke(main, args + ["--seed", "7"])
        assert json.loads(via_env.stdout) == json.loads(via_flag.stdout)

    def test_unannotated_cluster_exits_1(self, runner):
        result = runner.invoke(main, ["focus", FOOTBALL, "--cluster", "p(Field=dry)"])
        assert result.exit_code == 1
        assert "p(Field=dry)" in result.stderr


class TestRank:
    def test_rank_lists_the_single_annotation(self, runner):
        result = runner.invoke(
            main, ["rank", PRIOR, "--samples", "2000", "--format", "json"]
        )
        assert result.exit_code == 0
        payload = json.loads(result.stdout)
        assert len(payload) == 1
        assert payload[0]["param"] == "p(Win=yes)"


class TestSweep:
    def test_csv_default(self, runner):
        result = runner.invoke(
            main, ["sweep", PRIOR, "--param", "p(Win=yes)", "--grid", "5"]
        )
        assert result.exit_code == 0
        lines = result.stdout.strip().split("\n")
        assert lines[0] == "param_value,Bet,Do-not-bet"
        assert len(lines) == 6

    def test_json_has_crossing_at_half(self, runner):
        result = runner.invoke(
            main,
            ["sweep", PRIOR, "--param", "p(Win=yes)", "--grid", "101", "--format", "json"],
        )
        payload = json.loads(result.stdout)
        assert len(payload["crossings"]) == 1
        assert abs(payload["crossings"][0] - 0.5) <= 1e-6

    def test_utility_sweep_with_range(self, runner):
        result = runner.invoke(
            main,
            ["sweep", FOOTBALL, "--param", "u(Bet | Win=yes)", "--range", "0:10000",
             "--grid", "11", "--format", "json"],
        )
        assert result.exit_code == 0
        assert len(json.loads(result.stdout)["grid"]) == 11


class TestBounds:
    def test_field_interval(self, runner):
        result = runner.invoke(
            main,
            ["bounds", FOOTBALL, "--interval", "p(Field=dry)=0.6:0.8",
             "--target", "Win=yes", "--format", "json"],
        )
        assert result.exit_code == 0
        payload = json.loads(result.stdout)
        assert abs(payload["low"] - 0.52) <= 1e-9
        assert abs(payload["high"] - 0.54) <= 1e-9

    def test_malformed_interval_exits_1(self, runner):
        result = runner.invoke(
            main, ["bounds", FOOTBALL, "--interval", "p(Field=dry)", "--target", "Win=yes"]
        )
        assert result.exit_code == 1


class TestRefine:
    def test_extends_the_prior_to_the_full_model(self, runner, tmp_path):
        out = tmp_path / "refined.json"
        result = runner.invoke(
            main,
            ["refine", PRIOR, "--target", "p(Win=yes)", "--with", EXTENSION,
             "-o", str(out), "--format", "json"],
        )
        assert result.exit_code == 0, result.stderr
        payload = json.loads(result.stdout)
        assert payload["point_before"] == 0.5
        assert abs(payload["marginal_after"] - 0.53) <= 1e-9
        check = runner.invoke(main, ["eval", str(out), "--format", "json"])
        assert abs(json.loads(check.stdout)["expected_utilities"]["Bet"] - 300.0) <= 1e-9
