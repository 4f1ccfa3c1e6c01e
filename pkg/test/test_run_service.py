import json

import pytest

import seed
from Fssqm.errors import ConfigError
from Fssqm.models import StructureKind
from Fssqm.utils import run_service
from Fssqm.utils.linalg import DEFAULT_TOL


@pytest.fixture()
def cfg3():
    return run_service.config_from_dict(seed.oscillator(3, dim=24))


class TestConfig:
    def test_alias_and_echo(self, cfg3):
        assert cfg3.lam == 3
        echo = run_service.config_echo(cfg3)
        assert echo["lambda"] == 3
        assert echo["structure_function"]["kind"] == "oscillator"

    def test_load_from_file(self, tmp_path):
        path = tmp_path / "m.json"
        path.write_text(json.dumps(seed.c_lambda_extended([0.5, -0.5], dim=16)))
        cfg = run_service.load_config(path)
        assert cfg.structure_function.kind is StructureKind.C_LAMBDA_EXTENDED
        assert cfg.to_spec().alpha == (0.5, -0.5)

    def test_top_level_must_be_object(self, tmp_path):
        path = tmp_path / "m.json"
        path.write_text("[1, 2]")
        with pytest.raises(ConfigError, match="JSON object"):
            run_service.load_config(path)

    @pytest.mark.parametrize("mutate,message", [
        (lambda c: c.update(fock_dimension=8), "fock_dimension must be >= 4"),
        (lambda c: c["f"].pop(), "'f' must list lambda = 3"),
        (lambda c: c.update(extra_key=1), "extra_key"),
        (lambda c: c.update(tolerance=0), "tolerance"),
        (lambda c: c["f"][0].update(coeffs=[[1.0, 0.0]] * 12), "poly degree"),
    ])
    def test_validation_errors(self, mutate, message):
        data = seed.oscillator(3, dim=24)
        mutate(data)
        with pytest.raises(ConfigError, match=message):
            run_service.config_from_dict(data)

    def test_table_component(self):
        data = seed.oscillator(2, dim=8)
        data["f"][1] = {"kind": "table", "values": [[1.0, 0.0]] * 9}
        cfg = run_service.config_from_dict(data)
        assert cfg.components()[1].values[0] == 1.0


class TestTolerance:
    def test_precedence(self, cfg3):
        assert run_service.resolve_tolerance(cfg3, env={}) == 1e-9
        assert run_service.resolve_tolerance(cfg3, env={"FSSQM_TOL": "1e-6"}) == 1e-6
        bare = cfg3.model_copy(update={"tolerance": None})
        assert run_service.resolve_tolerance(bare, env={}) == DEFAULT_TOL

    @pytest.mark.parametrize("raw", ["abc", "0", "-1e-9"])
    def test_rejects_bad_override(self, cfg3, raw):
        with pytest.raises(ConfigError):
            run_service.resolve_tolerance(cfg3, env={"FSSQM_TOL": raw})


class TestReport:
    def test_run_report_sections(self, cfg3):
        model = run_service.build_from_config(cfg3)
        report = run_service.run_report(cfg3, model, 1e-9)
        assert report["passed"] is True
        assert set(report) == {"config", "tolerance", "passed", "audit", "spectrum",
                               "topology", "sectors"}
        assert [s["mu"] for s in report["sectors"]] == [0, 1, 2]
        assert report["topology"]["delta"][0] == [0, -1, -2]

    def test_sector_charge_action(self, cfg3):
        model = run_service.build_from_config(cfg3)
        sectors = run_service.run_report(cfg3, model, 1e-9)["sectors"]
        action = {step["source"]["fock"]: step for step in sectors[1]["charge_action"]}
        assert set(action) == {0, 1}
        assert action[0]["target"] is None
        assert action[0]["amplitude"] == [0.0, 0.0]
        assert action[1]["target"]["fock"] == 0
        assert abs(complex(*action[1]["amplitude"])) > 0.5
        assert sectors[2]["charge_action"] == []


class TestScanHelpers:
    def test_values(self):
        assert run_service.scan_values(0.0, 1.0, 5) == [0.0, 0.25, 0.5, 0.75, 1.0]
        assert run_service.scan_values(2.0, 2.0, 8) == [2.0]
        with pytest.raises(ConfigError):
            run_service.scan_values(0.0, 1.0, 0)

    def test_compensated_alpha_sums_to_zero(self):
        alpha = run_service.compensated_alpha([0.3, -0.2, -0.1], 0, 1.0, 1)
        assert alpha[0] == 1.0
        assert sum(alpha) == pytest.approx(0.0, abs=1e-15)

    def test_oscillator_base(self, cfg3):
        assert run_service.scan_base_alpha(cfg3) == [0.0, 0.0, 0.0]

    def test_index_checks(self, cfg3):
        with pytest.raises(ConfigError):
            run_service.run_scan(cfg3, 3, 0.0, 1.0, 2, 1e-9)
        with pytest.raises(ConfigError):
            run_service.run_scan(cfg3, 0, 0.0, 1.0, 2, 1e-9, compensate=0)

    def test_csv_marks_invalid_rows(self, cfg3):
        rows = run_service.run_scan(cfg3, 0, -2.0, -2.0, 1, 1e-9)
        text = run_service.scan_csv(rows, 3, 0)
        header, line = text.splitlines()
        assert header.startswith("step,alpha_0,valid,audit_pass,ground_degeneracy_0")
        assert line.startswith("0,-2.0,false,false,,invalid")
