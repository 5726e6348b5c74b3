import re

import numpy as np
import pytest

from carbkin.batch import TimeSeries, time_to_saturation
from carbkin.chem import AqueousModel, speciate_open
from carbkin.cli import main
from carbkin.kinetics import palandri_rate
from carbkin.ratedb import parse_db

from conftest import data_path


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestSpeciate:
    def test_pure_water(self, capsys):
        code, out, _ = run_cli(
            capsys, "speciate", "--carbon-total", "0", "--ca-total", "0"
        )
        assert code == 0
        assert "ph = 7.000000" in out

    def test_ambient_pressure(self, capsys):
        code, out, _ = run_cli(capsys, "speciate", "--p-co2", "3.16e-4")
        assert code == 0
        match = re.search(r"ph = ([0-9.]+)", out)
        assert match and abs(float(match.group(1)) - 5.66) < 0.05

    def test_missing_constraint_exits_2(self, capsys):
        code, _, err = run_cli(capsys, "speciate")
        assert code == 2
        assert "usage" in err

    def test_conflicting_constraints_exit_2(self, capsys):
        code, _, _ = run_cli(
            capsys, "speciate", "--p-co2", "0.5", "--carbon-total", "1e-3"
        )
        assert code == 2

    def test_solver_failure_exits_2_with_residual_context(self, capsys, tmp_path):
        path = tmp_path / "model.yaml"
        path.write_text("log_kh: 40\n")  # absurd Henry constant
        code, _, err = run_cli(
            capsys, "speciate", "--p-co2", "1.0", "--model", str(path)
        )
        assert code == 2
        assert "error" in err


class TestBatch:
    def test_writes_series_and_summary(self, capsys, tmp_path):
        out_csv = tmp_path / "run.csv"
        code, out, _ = run_cli(
            capsys, "batch",
            "--config", data_path("run7-like.yaml"),
            "--basis", "h2co3_activity",
            "--out", str(out_csv),
        )
        assert code == 0
        match = re.search(r"t_sat_s=([0-9.e+-]+)", out)
        assert match
        series = TimeSeries.from_csv(out_csv)
        assert np.all(np.diff(series.omega) >= -1e-8)
        assert float(match.group(1)) == pytest.approx(
            time_to_saturation(series), rel=1e-6
        )

    def test_published_basis_is_10_to_40_times_faster(self, capsys, tmp_path):
        t_sat = {}
        for basis in ("h2co3_activity", "p_co2"):
            code, out, _ = run_cli(
                capsys, "batch",
                "--config", data_path("run7-like.yaml"),
                "--basis", basis,
                "--out", str(tmp_path / f"{basis}.csv"),
            )
            assert code == 0
            t_sat[basis] = float(re.search(r"t_sat_s=([0-9.e+-]+)", out).group(1))
        ratio = t_sat["h2co3_activity"] / t_sat["p_co2"]
        assert 10.0 <= ratio <= 40.0

    def test_missing_config_exits_2(self, capsys, tmp_path):
        code, _, err = run_cli(
            capsys, "batch",
            "--config", str(tmp_path / "nope.yaml"),
            "--out", str(tmp_path / "run.csv"),
        )
        assert code == 2
        assert "error" in err

    def test_byte_stable_output(self, capsys, tmp_path):
        paths = []
        for i in (1, 2):
            path = tmp_path / f"run{i}.csv"
            run_cli(
                capsys, "batch",
                "--config", data_path("run7-like.yaml"),
                "--out", str(path),
            )
            paths.append(path)
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_env_var_overrides_default_db(self, capsys, tmp_path, monkeypatch):
        monkeypatch.setenv("CARBKIN_DB", str(tmp_path / "missing-db.yaml"))
        code, _, err = run_cli(
            capsys, "batch",
            "--config", data_path("run7-like.yaml"),
            "--out", str(tmp_path / "run.csv"),
        )
        assert code == 2
        assert "missing-db" in err


class TestValidate:
    def test_writes_report_and_aligned_series(self, capsys, tmp_path):
        out_dir = tmp_path / "val"
        code, out, _ = run_cli(
            capsys, "validate",
            "--config", data_path("run7-like.yaml"),
            "--experiment", data_path("run7_synthetic.csv"),
            "--out-dir", str(out_dir),
        )
        assert code == 0
        report = (out_dir / "report.csv").read_text().splitlines()
        assert report[0] == "metric,value"
        metrics = dict(line.split(",") for line in report[1:])
        assert 10.0 <= float(metrics["timescale_ratio"]) <= 40.0
        assert float(metrics["rmse_ph_h2co3_activity"]) < 1e-3
        assert float(metrics["rmse_ph_p_co2"]) > 0.1
        aligned_header = (out_dir / "aligned.csv").read_text().splitlines()[0]
        assert aligned_header.startswith("t_s,")

    def test_bad_experiment_exits_2(self, capsys, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("t_s\n0\n")
        code, _, err = run_cli(
            capsys, "validate",
            "--config", data_path("run7-like.yaml"),
            "--experiment", str(bad),
            "--out-dir", str(tmp_path / "val"),
        )
        assert code == 2
        assert "no observable" in err


class TestLintdb:
    def test_published_fixture_warns_and_exits_1(self, capsys):
        code, out, _ = run_cli(
            capsys, "lintdb", "--db", data_path("calcite.palandri-as-published")
        )
        assert code == 1
        lines = [line for line in out.splitlines() if line]
        assert len(lines) == 1
        assert lines[0].startswith("WARN calcite PCO2_BASIS")

    def test_default_fixture_is_clean(self, capsys):
        code, out, _ = run_cli(
            capsys, "lintdb", "--db", data_path("calcite.default")
        )
        assert code == 0
        assert out == ""

    def test_fix_then_relint_is_clean_and_rate_preserving(self, capsys, tmp_path):
        fixed_path = tmp_path / "fixed.yaml"
        code, _, _ = run_cli(
            capsys, "lintdb",
            "--db", data_path("calcite.palandri-as-published"),
            "--fix", "--out", str(fixed_path),
        )
        assert code == 1  # findings were present
        code, out, _ = run_cli(capsys, "lintdb", "--db", str(fixed_path))
        assert code == 0 and out == ""

        original = parse_db(data_path("calcite.palandri-as-published"))
        fixed = parse_db(fixed_path)
        state = speciate_open(AqueousModel(), 0.97, 0.0)
        rate_before = palandri_rate(
            original.minerals["calcite"].palandri, state, 0.97, 1.0, 298.15
        )
        rate_after = palandri_rate(
            fixed.minerals["calcite"].palandri, state, 0.97, 1.0, 298.15
        )
        assert rate_after == pytest.approx(rate_before, rel=1e-12)

    def test_fix_without_out_exits_2(self, capsys):
        code, _, err = run_cli(
            capsys, "lintdb",
            "--db", data_path("calcite.palandri-as-published"),
            "--fix",
        )
        assert code == 2
        assert "--out" in err

    def test_parse_error_exits_2(self, capsys, tmp_path):
        bad = tmp_path / "bad.yaml"
        bad.write_text("format_version: 1\nminerals: {}\n")
        code, _, err = run_cli(capsys, "lintdb", "--db", str(bad))
        assert code == 2
        assert "error" in err
