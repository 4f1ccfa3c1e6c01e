import csv
import io
import json

import pytest
from click.testing import CliRunner

import seed
from app import cli, load_settings


@pytest.fixture()
def runner():
    return CliRunner()


@pytest.fixture()
def write_config(tmp_path):
    def _write(cfg, name="model.json"):
        path = tmp_path / name
        path.write_text(cfg if isinstance(cfg, str) else json.dumps(cfg), encoding="utf-8")
        return str(path)

    return _write


def _csv_rows(path):
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


class TestVerify:
    def test_oscillator_passes(self, runner, write_config):
        path = write_config(seed.oscillator(3, dim=24))
        result = runner.invoke(cli, ["verify", "--config", path])
        assert result.exit_code == 0, result.output
        summary = result.output.strip().splitlines()[-1]
        count, failed = summary.split(" relations, ")
        assert int(count) >= 20
        assert failed == "0 failed"

    def test_json_report_is_deterministic(self, runner, write_config, tmp_path):
        path = write_config(seed.oscillator(2, dim=16))
        outs = []
        for k in range(2):
            out = tmp_path / f"report{k}.json"
            result = runner.invoke(cli, ["verify", "--config", path, "--format", "json",
                                         "--out", str(out)])
            assert result.exit_code == 0, result.output
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]
        report = json.loads(outs[0])
        assert report["passed"] is True
        assert "timings" not in report
        assert report["config"]["lambda"] == 2

    def test_timings_on_request(self, runner, write_config, tmp_path):
        path = write_config(seed.oscillator(2, dim=16))
        out = tmp_path / "report.json"
        runner.invoke(cli, ["verify", "--config", path, "--format", "json", "--timings",
                            "--out", str(out)])
        assert set(json.loads(out.read_text())["timings"]) == {"audit", "spectrum", "topology", "sectors"}

    def test_malformed_json(self, runner, write_config):
        path = write_config('{"lambda": 3,\n  "fock_dimension": }')
        result = runner.invoke(cli, ["verify", "--config", path])
        assert result.exit_code == 1
        assert "line 2, column" in result.output

    def test_missing_file(self, runner, tmp_path):
        result = runner.invoke(cli, ["verify", "--config", str(tmp_path / "nope.json")])
        assert result.exit_code == 1

    def test_alpha_sum(self, runner, write_config):
        path = write_config(seed.c_lambda_extended([0.5, 0.1], dim=16))
        result = runner.invoke(cli, ["verify", "--config", path])
        assert result.exit_code == 1
        assert "sum_mu alpha_mu = 0" in result.output

    def test_lambda_one(self, runner, write_config):
        cfg = seed.oscillator(2, dim=16)
        cfg["lambda"], cfg["f"] = 1, cfg["f"][:1]
        result = runner.invoke(cli, ["verify", "--config", write_config(cfg)])
        assert result.exit_code == 1
        assert "lambda" in result.output

    def test_structure_function_positivity(self, runner, write_config):
        path = write_config(seed.c_lambda_extended([-2.0, 2.0], dim=16))
        result = runner.invoke(cli, ["verify", "--config", path])
        assert result.exit_code == 1
        assert "F(1)" in result.output

    def test_tolerance_override_fails_relations(self, runner, write_config):
        path = write_config(seed.oscillator(3, dim=24))
        result = runner.invoke(cli, ["verify", "--config", path], env={"FSSQM_TOL": "1e-30"})
        assert result.exit_code == 2

    def test_bad_tolerance_override(self, runner, write_config):
        path = write_config(seed.oscillator(3, dim=24))
        result = runner.invoke(cli, ["verify", "--config", path], env={"FSSQM_TOL": "-1"})
        assert result.exit_code == 1
        assert "FSSQM_TOL" in result.output


class TestSpectrum:
    def test_csv_levels(self, runner, write_config, tmp_path):
        path = write_config(seed.oscillator(3, dim=30))
        out = tmp_path / "spectrum.csv"
        result = runner.invoke(cli, ["spectrum", "--config", path, "--levels", "4",
                                     "--format", "csv", "--out", str(out)])
        assert result.exit_code == 0, result.output
        rows = _csv_rows(out)
        assert [(r["energy"], r["multiplicity"]) for r in rows] == [
            ("0.0", "3"), ("2.0", "3"), ("6.0", "3"), ("12.0", "3")
        ]
        assert rows[0]["grades"] == "q^1 q^1 q^2"
        assert out.read_bytes().count(b"\r") == 0

    def test_too_many_levels(self, runner, write_config):
        path = write_config(seed.oscillator(3, dim=40))
        result = runner.invoke(cli, ["spectrum", "--config", path, "--levels", "20"])
        assert result.exit_code == 1
        assert "fock_dimension >= 66" in result.output

    def test_levels_must_be_positive(self, runner, write_config):
        path = write_config(seed.oscillator(3, dim=24))
        result = runner.invoke(cli, ["spectrum", "--config", path, "--levels", "0"])
        assert result.exit_code == 1


class TestSectors:
    def test_lambda3_csv(self, runner, write_config, tmp_path):
        path = write_config(seed.oscillator(3, dim=24))
        out = tmp_path / "sectors.csv"
        result = runner.invoke(cli, ["sectors", "--config", path, "--format", "csv",
                                     "--out", str(out)])
        assert result.exit_code == 0, result.output
        rows = _csv_rows(out)
        assert [r["classification"] for r in rows] == [
            "unbroken-nondegenerate", "broken-zero-energy", "broken-positive-energy"
        ]
        assert json.loads(rows[0]["delta"])[0] == [0, -1, -1]

    def test_lambda4_classification(self, runner, write_config, tmp_path):
        path = write_config(seed.oscillator(4, dim=32))
        out = tmp_path / "sectors.json"
        result = runner.invoke(cli, ["sectors", "--config", path, "--out", str(out)])
        assert result.exit_code == 0, result.output
        sectors = json.loads(out.read_text())["sectors"]
        assert [s["classification"] for s in sectors] == [
            "unbroken-nondegenerate",
            "broken-zero-energy",
            "broken-zero-energy",
            "broken-positive-energy",
        ]
        assert sectors[1]["topology"]["delta"][0][2] == -1
        assert sectors[3]["charge_action"] == []
        sources = sorted(step["source"]["fock"] for step in sectors[2]["charge_action"])
        assert sources == [0, 1, 2]

    def test_engineered_sector(self, runner, write_config, tmp_path):
        path = write_config(seed.reference_configs()["engineered_lambda4"])
        out = tmp_path / "sectors.csv"
        result = runner.invoke(cli, ["sectors", "--config", path, "--format", "csv",
                                     "--out", str(out)])
        assert result.exit_code == 0, result.output
        assert _csv_rows(out)[1]["classification"] == "unbroken-degenerate"


class TestScan:
    def test_lambda2_sweep(self, runner, write_config, tmp_path):
        path = write_config(seed.c_lambda_extended([0.0, 0.0], dim=24))
        out = tmp_path / "scan.csv"
        result = runner.invoke(cli, ["scan", "--config", path, "--index", "0", "--from", "-0.5",
                                     "--to", "3", "--steps", "8", "--out", str(out)])
        assert result.exit_code == 0, result.output
        rows = _csv_rows(out)
        assert [int(r["step"]) for r in rows] == list(range(8))
        assert all(r["valid"] == "true" and r["audit_pass"] == "true" for r in rows)

    def test_invalid_point_is_a_row(self, runner, write_config):
        path = write_config(seed.c_lambda_extended([0.0, 0.0], dim=24))
        result = runner.invoke(cli, ["scan", "--config", path, "--index", "0", "--from", "-2",
                                     "--to", "-2"])
        assert result.exit_code == 0, result.output
        rows = list(csv.DictReader(io.StringIO(result.output)))
        assert len(rows) == 1
        assert rows[0]["valid"] == "false"
        assert rows[0]["error"]

    def test_workers_keep_order(self, runner, write_config, tmp_path):
        path = write_config(seed.c_lambda_extended([0.3, -0.2, -0.1], dim=24))
        outs = []
        for workers in ("1", "3"):
            out = tmp_path / f"scan{workers}.csv"
            runner.invoke(cli, ["scan", "--config", path, "--index", "1", "--from", "-0.2",
                                "--to", "0.4", "--steps", "4", "--workers", workers,
                                "--out", str(out)])
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]

    def test_table_structure_function_rejected(self, runner, write_config):
        cfg = seed.oscillator(2, dim=16)
        cfg["structure_function"] = {"kind": "table", "values": list(range(20))}
        result = runner.invoke(cli, ["scan", "--config", write_config(cfg), "--index", "0",
                                     "--from", "0", "--to", "1"])
        assert result.exit_code == 1


def test_usage_error_exits_one(runner):
    result = runner.invoke(cli, ["verify"])
    assert result.exit_code == 1
    result = runner.invoke(cli, ["no-such-command"])
    assert result.exit_code == 1


def test_settings_hold_only_the_log_level():
    assert load_settings({}) == {"LOG_LEVEL": "WARNING"}
    assert load_settings({"FSSQM_LOG_LEVEL": "debug", "FSSQM_TOL": "1e-6"}) == {"LOG_LEVEL": "DEBUG"}
