import hashlib
import subprocess
import sys

import pytest

from sublora.cli import main
from sublora.config import DEFAULTS, ExperimentConfig, load_named_profile, parse_config_file
from sublora.errors import ConfigError


def sha(path):
    return hashlib.sha256(open(path, "rb").read()).hexdigest()


class TestConfigParsing:
    def test_parse_and_coerce(self, tmp_path):
        p = tmp_path / "x.cfg"
        p.write_text(
            "# comment\n"
            "scenario.n_devices = 500\n"
            "soil.vwc = 0.2   # trailing comment\n"
            "lora.crc = false\n"
            "sweep.sf = 7,9,11\n"
        )
        values = parse_config_file(p)
        assert values["scenario.n_devices"] == 500
        assert values["soil.vwc"] == 0.2
        assert values["lora.crc"] is False
        assert values["sweep.sf"] == [7, 9, 11]

    def test_unknown_key_rejected(self, tmp_path):
        p = tmp_path / "bad.cfg"
        p.write_text("scenario.frobnicate = 1\n")
        with pytest.raises(ConfigError):
            parse_config_file(p)

    def test_overrides_and_defaults(self):
        cfg = ExperimentConfig.load("run", overrides={"run.trials": 7})
        assert cfg["run.trials"] == 7
        assert cfg["scenario.n_devices"] == DEFAULTS["scenario.n_devices"]

    def test_point_seeds_stable_and_distinct(self):
        cfg = ExperimentConfig.load("run")
        assert cfg.point_seeds(0) == cfg.point_seeds(0)
        assert cfg.point_seeds(0) != cfg.point_seeds(1)

    def test_scenario_builder(self):
        cfg = ExperimentConfig.load("run", overrides={"run.trials": 3})
        sc = cfg.scenario(0, sf=8, n_devices=12)
        assert sc.sf == 8 and sc.n_devices == 12 and sc.trials == 3

    def test_named_profiles(self):
        default = load_named_profile("default")
        calibrated = load_named_profile("calibrated")
        assert default.overhead_energy_j == 0.0
        assert calibrated.overhead_energy_j > 0.0
        with pytest.raises(ConfigError):
            load_named_profile("nonexistent")


class TestCli:
    def run_cli(self, *argv):
        return main(list(argv))

    def test_toa_table(self, capsys):
        assert self.run_cli("toa-table") == 0
        out = capsys.readouterr().out.strip().splitlines()
        assert out[0] == "sf,computed_ms,reference_ms"
        assert len(out) == 7
        sf9 = out[3].split(",")
        assert sf9[0] == "9" and float(sf9[1]) == 205.824 and float(sf9[2]) == 155.648

    def test_run_writes_csv_with_header(self, tmp_path, capsys):
        out = tmp_path / "run.csv"
        code = self.run_cli("run", "--trials", "3", "--out", str(out),
                            "--energy-profile", "default",
                            "--config", self.small_cfg(tmp_path))
        assert code == 0
        text = out.read_text()
        assert text.startswith("# sublora")
        assert "# figure_kind = run" in text
        assert "# config.run.seed = 1" in text
        assert "lifetime_years" in text

    def small_cfg(self, tmp_path):
        p = tmp_path / "small.cfg"
        p.write_text("scenario.n_devices = 40\nsoil.vwc = 0.05\n"
                     "scenario.burial_depth_m = 0.4\nscenario.wet_duration_s = 600\n")
        return str(p)

    def test_byte_identical_rerun(self, tmp_path):
        cfg = self.small_cfg(tmp_path)
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        for out in (a, b):
            assert self.run_cli("run", "--trials", "5", "--out", str(out),
                                "--energy-profile", "default", "--config", cfg) == 0
        assert sha(a) == sha(b)

    def test_seed_changes_output(self, tmp_path):
        cfg = self.small_cfg(tmp_path)
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        self.run_cli("run", "--trials", "5", "--out", str(a),
                     "--energy-profile", "default", "--config", cfg)
        self.run_cli("run", "--trials", "5", "--out", str(b), "--seed", "2",
                     "--energy-profile", "default", "--config", cfg)
        assert sha(a) != sha(b)

    def test_config_error_exit_code(self, tmp_path):
        bad = tmp_path / "bad.cfg"
        bad.write_text("nonsense.key = 1\n")
        assert self.run_cli("run", "--config", str(bad)) == 2

    def test_calibrate_infeasible_exit_code(self, tmp_path, capsys):
        cfg = tmp_path / "c.cfg"
        # without harvest (t_w = 0) a 1e9-year anchor needs negative overhead
        cfg.write_text("calibration.anchor_lifetime_years = 1000000000\n"
                       "calibration.t_w_s = 0\n"
                       "scenario.n_devices = 30\nsoil.vwc = 0.05\n"
                       "scenario.burial_depth_m = 0.4\n")
        code = self.run_cli("calibrate", "--config", str(cfg), "--trials", "3",
                            "--energy-profile", "default",
                            "--out", str(tmp_path / "p.profile"))
        assert code == 3

    def test_calibrate_writes_profile(self, tmp_path):
        out = tmp_path / "fitted.profile"
        cfg = tmp_path / "c.cfg"
        cfg.write_text("scenario.n_devices = 40\nsoil.vwc = 0.05\n"
                       "scenario.burial_depth_m = 0.4\n"
                       "calibration.anchor_lifetime_years = 2.0\n")
        code = self.run_cli("calibrate", "--config", str(cfg), "--trials", "5",
                            "--energy-profile", "default", "--out", str(out))
        assert code == 0
        from sublora.energy import load_profile
        assert load_profile(out).overhead_energy_j > 0.0

    def test_module_entrypoint(self):
        proc = subprocess.run([sys.executable, "-m", "sublora.cli", "--version"],
                              capture_output=True, text=True)
        assert proc.returncode == 0
        assert "sublora" in proc.stdout


class TestPresetSweeps:
    def cfg(self, tmp_path, extra=""):
        p = tmp_path / "sweep.cfg"
        p.write_text(
            "scenario.n_devices = 60\n"
            "run.trials = 4\n"
            "sweep.sf = 8,9\n"
            "sweep.burial_depth_m = 0.4\n"
            "sweep.vwc = 0.05,0.119\n"
            "sweep.t_w_s = 300,900,1500\n"
            "sweep.n_devices = 20,40\n"
            "sweep.report_period_s = 900,1800\n"
            "sweep.received_power_w = 0,0.02\n" + extra)
        return str(p)

    def test_fig3_rows_and_determinism(self, tmp_path):
        out = tmp_path / "fig3.csv"
        assert main(["fig3", "--config", self.cfg(tmp_path), "--out", str(out),
                     "--energy-profile", "default"]) == 0
        lines = [l for l in out.read_text().splitlines() if not l.startswith("#")]
        assert lines[0] == "depth_m,vwc,sf,p_snr,p_sir,p_s,ci,epp_j"
        assert len(lines) == 1 + 1 * 2 * 2  # depths x vwcs x sfs
        out2 = tmp_path / "fig3b.csv"
        main(["fig3", "--config", self.cfg(tmp_path), "--out", str(out2),
              "--energy-profile", "default"])
        assert sha(out) == sha(out2)

    def test_fig4_unimodal_columns_present(self, tmp_path):
        out = tmp_path / "fig4.csv"
        assert main(["fig4", "--config", self.cfg(tmp_path), "--out", str(out)]) == 0
        lines = [l for l in out.read_text().splitlines() if not l.startswith("#")]
        assert lines[0] == "sf,t_w_s,lifetime_years,p_s,harvest_j,consumption_j"
        assert len(lines) == 1 + 2 * 3

    def test_fig5_runs_small(self, tmp_path):
        out = tmp_path / "fig5.csv"
        assert main(["fig5", "--config", self.cfg(tmp_path), "--out", str(out),
                     "--trials", "3"]) == 0
        lines = [l for l in out.read_text().splitlines() if not l.startswith("#")]
        assert lines[0] == "n,t_s,p_r_w,sf_opt,t_w_opt,lifetime_years"
        assert len(lines) == 1 + 2 * 2 * 2

    def test_rejected_sweep_point_exit_code(self, tmp_path):
        # t_w beyond the reporting period: point rejected, run continues
        cfg = self.cfg(tmp_path, "sweep.t_w_s = 300,1801\n")
        out = tmp_path / "fig4r.csv"
        code = main(["fig4", "--config", cfg, "--out", str(out),
                     "--energy-profile", "default"])
        assert code == 4
        text = out.read_text()
        assert "# reject" in text
        data = [l for l in text.splitlines() if not l.startswith("#")]
        assert len(data) == 1 + 2 * 1  # valid t_w rows survive per SF
