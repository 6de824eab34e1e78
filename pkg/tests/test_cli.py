import json
import subprocess
import sys

import pytest

from fixedkern.cli import EXIT_DATA, EXIT_NUMERIC, EXIT_OK, EXIT_USAGE, main


def run(*args):
    return main([str(a) for a in args])


@pytest.fixture
def series_csv(tmp_path):
    out = tmp_path / "sim"
    assert run("simulate", "--T", 300, "--seed", 5, "--output", out) == EXIT_OK
    return out / "series.csv"


class TestExitCodes:
    def test_success(self, fixture_csv, tmp_path):
        code = run("pipeline", fixture_csv, "--value-column", "sla_mm", "--deseasonalize", "--output", tmp_path)
        assert code == EXIT_OK
        assert (tmp_path / "curves.csv").exists() and (tmp_path / "acf_e.svg").exists()

    def test_malformed_inputs(self, malformed_csv, tmp_path, capsys):
        code = run("pipeline", malformed_csv, "--value-column", "sla_mm", "--output", tmp_path)
        assert code == EXIT_DATA
        err = capsys.readouterr().err
        assert "line" in err and "ingest" in err

    def test_missing_file(self, tmp_path):
        assert run("fit", tmp_path / "nope.csv", "--h", 0.2) == EXIT_DATA

    def test_numerical(self, tmp_path):
        p = tmp_path / "line.csv"
        p.write_text("time,value\n" + "".join(f"{t},{2 + 0.03 * t}\n" for t in range(1, 151)))
        assert run("fit", p, "--h", 0.2, "--output", tmp_path) == EXIT_NUMERIC

    def test_usage(self, capsys):
        with pytest.raises(SystemExit) as info:
            run("frobnicate")
        assert info.value.code == EXIT_USAGE
        with pytest.raises(SystemExit) as info:
            run("theta", "--beta", "10")
        assert info.value.code == EXIT_USAGE

    def test_invalid_values_are_usage_errors(self, series_csv):
        assert run("theta", "--beta", 10, "--s", 2) == EXIT_USAGE
        assert run("fit", series_csv, "--h", 0.001) == EXIT_USAGE
        assert run("simulate", "--threads", 0) == EXIT_USAGE

    def test_bad_config(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text("{not json")
        assert run("pipeline", "--config", cfg) == EXIT_DATA
        cfg.write_text('{"colour": 1}')
        assert run("theta", "--beta", 10, "--s", 4, "--config", cfg) == EXIT_USAGE

    def test_module_entry_point(self, tmp_path):
        proc = subprocess.run([sys.executable, "-m", "fixedkern", "theta", "--beta", "10", "--s", "4"],
                              capture_output=True, text=True)
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["theta"] == pytest.approx(13 / 41)


class TestSubcommands:
    def test_theta(self, capsys):
        assert run("theta", "--beta", 10, "--s", 4) == EXIT_OK
        out = json.loads(capsys.readouterr().out)
        assert out == {"mode": "in_probability", "theta": pytest.approx(13 / 41), "beta_lower_bound": 3.5,
                       "admissible": True}

    def test_seed_position_irrelevant(self, tmp_path):
        run("--seed", 9, "simulate", "--T", 50, "--output", tmp_path / "a")
        run("simulate", "--T", 50, "--seed", 9, "--output", tmp_path / "b")
        assert (tmp_path / "a" / "series.csv").read_bytes() == (tmp_path / "b" / "series.csv").read_bytes()

    def test_fit(self, series_csv, tmp_path, capsys):
        assert run("fit", series_csv, "--h", 0.2, "--output", tmp_path) == EXIT_OK
        summary = json.loads(capsys.readouterr().out)
        assert summary["n_obs"] == 300 and summary["interior_margin"] == pytest.approx(0.4)
        rows = (tmp_path / "curves.csv").read_text().splitlines()
        assert rows[0] == "t,y,g_hat,v_hat,phi_hat,e_hat" and len(rows) == 301

    def test_cv(self, series_csv, tmp_path, capsys):
        assert run("cv", series_csv, "--h-grid", "0.1,0.2,0.3", "--output", tmp_path) == EXIT_OK
        report = json.loads((tmp_path / "cv.json").read_text())
        assert report["h"] in (0.1, 0.2, 0.3) and len(report["scores"]) == 3

    def test_diagnose(self, series_csv, tmp_path, capsys):
        assert run("diagnose", series_csv, "--no-arma", "--output", tmp_path) == EXIT_OK
        report = json.loads((tmp_path / "diagnostics.json").read_text())
        assert len(report["acf"]) == 30 and (tmp_path / "pacf.svg").exists()

    def test_rate_check(self, tmp_path, capsys):
        assert run("rate-check", "--T", "500,1000", "--reps", 3, "--output", tmp_path) == EXIT_OK
        report = json.loads((tmp_path / "rate_check.json").read_text())
        assert report["sample_sizes"] == [500, 1000]

    def test_mc_table1(self, tmp_path, capsys):
        code = run("mc-table1", "--T", "100", "--sigma2", "1", "--reps", 3, "--h", 0.2, "--output", tmp_path)
        assert code == EXIT_OK
        assert (tmp_path / "mase.csv").read_text().startswith("T,sigma2")
        assert json.loads((tmp_path / "mase.json").read_text())[0]["median_h"] == 0.2

    def test_pipeline_from_config(self, fixture_csv, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"input_path": str(fixture_csv), "value_column": "sla_mm",
                                   "deseasonalize": True, "bandwidth_mode": "fixed", "h": 0.25}))
        assert run("pipeline", "--config", cfg, "--output", tmp_path / "o") == EXIT_OK
        report = json.loads((tmp_path / "o" / "diagnostics.json").read_text())
        assert report["h"] == 0.25 and report["config"]["deseasonalize"] is True

    def test_config_defaults_for_other_commands(self, tmp_path, capsys):
        cfg = tmp_path / "c.json"
        cfg.write_text('{"mode": "almost_sure"}')
        assert run("theta", "--beta", 200, "--s", 10, "--config", cfg) == EXIT_OK
        assert json.loads(capsys.readouterr().out)["mode"] == "almost_sure"
