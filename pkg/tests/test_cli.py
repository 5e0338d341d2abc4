import importlib.resources
import json

import pytest

from bfmeta.cli import main


FIXTURE = str(importlib.resources.files("bfmeta") / "data" / "bolier2013.csv")
SCENARIO = str(importlib.resources.files("bfmeta") / "data" / "fixed_eq.toml")


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestBfCommand:
    def test_study5_both_priors(self, capsys):
        code, out, _ = run_cli(capsys, "bf", "--t", "3.6", "--n1", "8", "--n2", "8")
        assert code == 0
        assert "2logBF10=6.2009" in out
        assert "2logBF10=5.38463" in out

    def test_zero_t_with_fixed_g(self, capsys):
        code, out, _ = run_cli(capsys, "bf", "--t", "0", "--n", "66", "--g", "66")
        assert code == 0
        assert "2logBF10=-4.20469" in out

    def test_study2_needs_groups_for_jzs(self, capsys):
        code, out, _ = run_cli(capsys, "bf", "--t", "0.5", "--n", "32")
        assert code == 0
        assert "-3.24707" in out  # g-prior value
        assert "unavailable" in out
        code, out, _ = run_cli(capsys, "bf", "--t", "0.5", "--n1", "17", "--n2", "15")
        assert "-3.2" in out and "-2.5" in out

    def test_json_format(self, capsys):
        code, out, _ = run_cli(
            capsys, "bf", "--t", "2.0", "--n1", "20", "--n2", "20", "--format", "json"
        )
        payload = json.loads(out)
        assert payload["n"] == 40
        assert "two_log_bf_jzs" in payload

    def test_input_error_exit_code(self, capsys):
        code, _, err = run_cli(capsys, "bf", "--t", "1.0")
        assert code == 2
        assert "sample size" in err


class TestMetaCommand:
    def test_worked_example_all_methods(self, capsys):
        code, out, _ = run_cli(capsys, "meta", FIXTURE)
        assert code == 0
        for token in ("9.00084", "9.64459", "11.8461", "12.7652"):
            assert token in out

    def test_json_output(self, capsys):
        code, out, _ = run_cli(capsys, "meta", FIXTURE, "--format", "json")
        payload = json.loads(out)
        assert payload["case_detected"] == "detailed"
        assert payload["meta"]["meta_bf_g_P"]["two_log_bf10"] == pytest.approx(
            9.000841, abs=1e-5
        )

    def test_missing_file_is_input_error(self, capsys):
        code, _, err = run_cli(capsys, "meta", "/nope/missing.csv")
        assert code == 2
        assert "input error" in err

    def test_single_row_degenerate(self, capsys, tmp_path):
        path = tmp_path / "one.csv"
        path.write_text("study_id,t_stat,n1,n2\nonly,2.1,20,20\n")
        code, out, _ = run_cli(capsys, "meta", str(path), "--format", "json")
        payload = json.loads(out)
        single = payload["studies"][0]["two_log_bf_g"]
        assert payload["meta"]["meta_bf_g_P"]["two_log_bf10"] == pytest.approx(single)

    def test_all_unknown_signs_runs_limited_only(self, capsys, tmp_path):
        path = tmp_path / "unk.csv"
        path.write_text(
            "study_id,t_stat,n,sign\na,1.2,30,?\nb,2.0,40,?\nc,0.7,50,?\n"
        )
        code, out, _ = run_cli(capsys, "meta", str(path), "--format", "json")
        payload = json.loads(out)
        assert code == 0
        assert "meta_bf_g_L" in payload["meta"]
        assert "meta_bf_g_P" in payload["meta_errors"]
        assert "meta_bf_g_D" in payload["meta_errors"]

    def test_writes_output_file(self, capsys, tmp_path):
        out_path = tmp_path / "report.json"
        code, out, _ = run_cli(
            capsys, "meta", FIXTURE, "--format", "json", "--out", str(out_path)
        )
        assert code == 0
        assert out == ""
        assert json.loads(out_path.read_text())["version"]


class TestSimulateCommand:
    def test_smoke_run_and_determinism(self, capsys, tmp_path):
        scenario = tmp_path / "tiny.toml"
        scenario.write_text(
            'model = "t_test"\nbetas = [0.2]\nk_values = [2]\n'
            "n_total = 200\nreplicates = 3\nseed = 42\n"
        )
        out1 = tmp_path / "m1.csv"
        out2 = tmp_path / "m2.csv"
        code, _, _ = run_cli(capsys, "simulate", str(scenario), "--out", str(out1))
        assert code == 0
        code, _, _ = run_cli(capsys, "simulate", str(scenario), "--out", str(out2))
        assert code == 0
        assert out1.read_bytes() == out2.read_bytes()
        text = out1.read_text()
        assert "# seed = 42" in text
        assert "# rng = PCG64" in text
        assert "meta_bf_jzs" in text

    def test_replicate_export_with_clipping(self, capsys, tmp_path):
        scenario = tmp_path / "tiny.toml"
        scenario.write_text(
            'model = "t_test"\nbetas = [0.0]\nk_values = [2]\n'
            "n_total = 200\nreplicates = 2\nseed = 7\n"
        )
        reps = tmp_path / "reps.csv"
        code, _, _ = run_cli(
            capsys, "simulate", str(scenario),
            "--out", str(tmp_path / "m.csv"), "--replicates-out", str(reps),
        )
        assert code == 0
        text = reps.read_text()
        assert "meta_bf_g_D_clipped" in text

    def test_invalid_weights_config_error(self, capsys, tmp_path):
        scenario = tmp_path / "bad.toml"
        scenario.write_text(
            'model = "t_test"\nbetas = [0.1]\nk_values = [2]\npartition = "UNEQ"\n'
            "weights_sq = [0.7, 0.4]\nn_total = 1000\nreplicates = 2\nseed = 1\n"
        )
        code, _, err = run_cli(capsys, "simulate", str(scenario))
        assert code == 3
        assert "config error" in err

    def test_unparseable_toml_config_error(self, capsys, tmp_path):
        scenario = tmp_path / "broken.toml"
        scenario.write_text("model = [unclosed\n")
        code, _, err = run_cli(capsys, "simulate", str(scenario))
        assert code == 3

    def test_bundled_scenario_parses(self):
        from bfmeta.simulation import load_scenario_file

        specs = load_scenario_file(SCENARIO)
        assert len(specs) == 12


class TestClassifyCommand:
    def test_levels(self, capsys):
        code, out, _ = run_cli(capsys, "classify", "--two-log-bf", "11.83")
        assert code == 0
        assert "very strong" in out
        code, out, _ = run_cli(
            capsys, "classify", "--two-log-bf", "-7.0", "--orientation", "BF01"
        )
        assert "strong" in out
