import json

import pytest

from nsseries import load_config, run_experiment, serialize_config, emit_report
from nsseries.cli import main
from nsseries.experiment import (ChecksConfig, ExperimentConfig, GridConfig,
                                 InitialConfig, TimeConfig, TruncationConfig)


BASE_TOML = """\
nu = 1.0
method = "fft"

[grid]
h = 0.5
R = 1.0

[time]
t_max = 0.5
M = 16

[initial]
amplitude = 0.1
width = 1.0

[truncation]
K_max = 3
"""


def _write(tmp_path, text, name="cfg.toml"):
    path = tmp_path / name
    path.write_text(text)
    return path


def _base_cfg(**checks):
    return ExperimentConfig(
        grid=GridConfig(h=0.5, R=1.0),
        time=TimeConfig(t_max=0.5, M=16),
        initial=InitialConfig(amplitude=0.1),
        truncation=TruncationConfig(K_max=3),
        checks=ChecksConfig(oracle=False, complex_ext=False, **checks),
    )


class TestConfig:
    def test_load_minimal(self, tmp_path):
        cfg = load_config(_write(tmp_path, BASE_TOML))
        assert cfg.grid.R == 1.0
        assert cfg.time.M == 16
        assert cfg.initial.amplitude == 0.1
        assert cfg.checks.envelopes is True  # defaulted

    def test_serialize_roundtrip(self, tmp_path):
        cfg = load_config(_write(tmp_path, BASE_TOML))
        text = serialize_config(cfg)
        cfg2 = load_config(_write(tmp_path, text, "again.toml"))
        assert cfg2 == cfg

    def test_unknown_top_level_key(self, tmp_path):
        with pytest.raises(ValueError, match="unknown top-level"):
            load_config(_write(tmp_path, "bogus = 1\n" + BASE_TOML))

    def test_unknown_section_key(self, tmp_path):
        text = BASE_TOML + "\n[checks]\ntypo_key = true\n"
        with pytest.raises(ValueError, match="typo_key"):
            load_config(_write(tmp_path, text))

    def test_section_must_be_table(self, tmp_path):
        with pytest.raises(ValueError, match="table"):
            load_config(_write(tmp_path, 'grid = "oops"\n'))

    @pytest.mark.parametrize("patch", [
        {"nu": 0.0},
        {"d": 2},
        {"method": "magic"},
        {"c_hat": -1.0},
    ])
    def test_scalar_validation(self, patch):
        cfg = _base_cfg()
        for k, v in patch.items():
            setattr(cfg, k, v)
        with pytest.raises(ValueError):
            cfg.validate()

    def test_block_validation(self):
        cfg = _base_cfg()
        cfg.grid.h = -0.5
        with pytest.raises(ValueError, match="grid"):
            cfg.validate()
        cfg = _base_cfg()
        cfg.time.M = 0
        with pytest.raises(ValueError, match="time"):
            cfg.validate()
        cfg = _base_cfg()
        cfg.initial.family = "vortex"
        with pytest.raises(ValueError, match="gaussian"):
            cfg.validate()
        cfg = _base_cfg()
        cfg.truncation.tail_tol = 0.0
        with pytest.raises(ValueError, match="truncation"):
            cfg.validate()


class TestRunExperiment:
    def test_base_run_passes(self):
        rep = run_experiment(_base_cfg())
        assert rep.passed and not rep.failed
        assert rep.errors == []
        assert 0.0 < rep.rho < 0.5
        assert len(rep.term_norms) == 4
        assert len(rep.term_ratios) == 3
        assert rep.chosen_K is not None and rep.chosen_K <= 3
        assert rep.fixed_point_pass and rep.energy_pass and rep.envelopes_pass
        assert all(r["violations"] == 0 for r in rep.envelopes)
        assert rep.momentum_residual is not None

    def test_deterministic_modulo_timings(self):
        a = run_experiment(_base_cfg()).to_dict()
        b = run_experiment(_base_cfg()).to_dict()
        a.pop("timings")
        b.pop("timings")
        assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)

    def test_divergent_data_reported(self):
        cfg = _base_cfg()
        cfg.initial.amplitude = 50.0
        rep = run_experiment(cfg)
        assert rep.divergence_predicted
        assert rep.term_ratios[-1] > 1.0
        assert rep.passed  # predicted divergence confirmed by growing terms

    def test_oracle_check(self):
        cfg = _base_cfg()
        cfg.time = TimeConfig(t_max=0.25, M=64)
        cfg.checks.oracle = True
        cfg.checks.oracle_substeps = 4
        rep = run_experiment(cfg)
        assert rep.oracle_pass
        assert rep.oracle["sup_gap"] <= 1e-4 * rep.oracle["u0_l2"]
        assert len(rep.oracle["gaps"]) == 65

    def test_growth_check(self):
        cfg = _base_cfg()
        cfg.grid = GridConfig(h=0.5, R=2.0)
        cfg.time = TimeConfig(t_max=0.5, M=8)
        cfg.checks.complex_ext = True
        cfg.checks.growth_times = [0.25, 0.5]
        rep = run_experiment(cfg)
        assert rep.growth_pass
        assert len(rep.growth) == 2 * cfg.checks.growth_directions
        assert all(f["order"] <= 2.3 for f in rep.growth)

    def test_dump_fields(self, tmp_path):
        from nsseries import load_field
        cfg = _base_cfg()
        cfg.output.dump_fields = True
        cfg.output.report_dir = str(tmp_path)
        run_experiment(cfg)
        u0 = load_field(tmp_path / "u0.cnsf")
        vf = load_field(tmp_path / "v_final.cnsf")
        assert u0.values.shape == vf.values.shape


@pytest.fixture(scope="module")
def report():
    cfg = _base_cfg()
    cfg.grid = GridConfig(h=0.5, R=2.0)
    cfg.time = TimeConfig(t_max=0.5, M=8)
    cfg.checks.complex_ext = True
    return run_experiment(cfg)


class TestEmitReport:
    def test_files_written(self, report, tmp_path):
        paths = emit_report(report, report_dir=tmp_path)
        names = {p.name for p in paths}
        assert names == {"report.json", "energy.csv", "term_norms.csv",
                         "growth.csv"}
        loaded = json.loads((tmp_path / "report.json").read_text())
        assert loaded["passed"] == report.passed
        assert loaded["grid_hash"] == report.grid_hash

    def test_energy_csv_rows(self, report, tmp_path):
        emit_report(report, report_dir=tmp_path, formats=("csv",))
        lines = (tmp_path / "energy.csv").read_text().strip().splitlines()
        assert lines[0] == "t,E"
        assert len(lines) == 1 + 9  # header + M+1 time nodes
        t0, E0 = lines[1].split(",")
        assert float(t0) == 0.0 and float(E0) > 0.0

    def test_json_only(self, report, tmp_path):
        paths = emit_report(report, report_dir=tmp_path, formats=("json",))
        assert [p.name for p in paths] == ["report.json"]


class TestCli:
    def _cfg_file(self, tmp_path, extra=""):
        text = BASE_TOML + f'\n[output]\nreport_dir = "{tmp_path}/out"\n' \
            + extra
        return str(_write(tmp_path, text))

    def test_run(self, tmp_path, capsys):
        rc = main(["run", self._cfg_file(tmp_path)])
        out = capsys.readouterr().out
        assert rc == 0
        assert "passed = True" in out
        assert (tmp_path / "out" / "report.json").exists()

    def test_run_failing_exit_code(self, tmp_path, capsys):
        # divergent data with truncation tail check -> overall fail is only
        # avoided when growth confirms it; damp the growth by shrinking t
        extra = "\n[checks]\noracle = true\noracle_gap_rel = 1e-30\n"
        rc = main(["run", self._cfg_file(tmp_path, extra)])
        assert rc == 1

    def test_check_inequalities(self, capsys):
        rc = main(["check-inequalities", "--seed", "3", "--cases", "500"])
        out = capsys.readouterr().out
        assert rc == 0
        assert "passed = True" in out

    def test_calibrate_constant(self, capsys):
        rc = main(["calibrate-constant", "--corpus-size", "8", "--seed", "1"])
        out = capsys.readouterr().out
        assert rc == 0
        assert "C_hat" in out

    def test_compare_oracle(self, tmp_path, capsys):
        text = BASE_TOML.replace("t_max = 0.5", "t_max = 0.25") \
                        .replace("M = 16", "M = 64")
        text += f'\n[output]\nreport_dir = "{tmp_path}/out"\n'
        text += "\n[checks]\noracle_substeps = 4\n"
        path = str(_write(tmp_path, text))
        rc = main(["compare-oracle", path])
        out = capsys.readouterr().out
        assert rc == 0
        assert "sup_gap" in out

    def test_growth(self, tmp_path, capsys):
        text = BASE_TOML.replace("R = 1.0", "R = 2.0")
        text += f'\n[output]\nreport_dir = "{tmp_path}/out"\n'
        path = str(_write(tmp_path, text))
        rc = main(["growth", path])
        out = capsys.readouterr().out
        assert rc == 0
        assert "order=" in out
        assert (tmp_path / "out" / "growth.csv").exists()

    def test_bad_config_raises(self, tmp_path):
        path = _write(tmp_path, BASE_TOML + "\nnot_a_key = 2\n")
        with pytest.raises(ValueError):
            main(["run", str(path)])
