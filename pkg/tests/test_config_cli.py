import json
from pathlib import Path

import numpy as np
import pytest

from chirpecho.cli import main
from chirpecho.config import ConfigError, defaults, parse_config
from chirpecho import reference


class TestConfig:
    def test_defaults_cover_schema(self):
        cfg = defaults()
        assert cfg.get("source", "rho") == 0.9
        assert cfg.get("channel", "alpha") == 0.21
        assert cfg.get("detectors", "beta") == 2
        assert cfg.get("multiplexing", "m_t") == 20
        assert cfg.get("memory", "eta_o") == 0.65

    def test_parse_and_override(self):
        cfg = parse_config("""
# comment
[source]
rho = 0.8
[multiplexing]
m_s = 5
""")
        assert cfg.get("source", "rho") == 0.8
        assert cfg.get("multiplexing", "m_s") == 5
        assert cfg.get("multiplexing", "m_t") == 20  # untouched default

    def test_unknown_key_reports_line(self):
        with pytest.raises(ConfigError, match="line 3"):
            parse_config("[source]\nrho = 0.8\nbogus = 1\n")

    def test_unknown_section(self):
        with pytest.raises(ConfigError, match="unknown section"):
            parse_config("[nonsense]\nx = 1\n")

    def test_bad_value(self):
        with pytest.raises(ConfigError, match="line 2"):
            parse_config("[source]\nrho = banana\n")

    def test_key_outside_section(self):
        with pytest.raises(ConfigError, match="outside any section"):
            parse_config("rho = 0.9\n")

    def test_float_list(self):
        cfg = parse_config("[sweep]\nm_s_values = 3, 10\n")
        assert cfg.get("sweep", "m_s_values") == (3.0, 10.0)


def run_cli(tmp_path, *args):
    out = tmp_path / "out"
    code = main([*args, "--out-dir", str(out)])
    return code, out


def write_cfg(tmp_path, text):
    p = tmp_path / "run.cfg"
    p.write_text(text)
    return str(p)


SMALL_SWEEP = """
[sweep]
l_min_km = 50
l_max_km = 200
l_step_km = 50
m_s_values = 3
n_max = 16
t2_points = 3
eta_o_points = 3
"""

SMALL_MC = """
[mc]
n_cycles = 20000
l_km = 100
n_links = 2
seed = 7
stream_outcomes = 5
"""

SMALL_PULSE = """
[pulse]
mode = single
n_atoms = 301
tau2_us = 60
"""


class TestAnalytic:
    def test_outputs_and_schema(self, tmp_path):
        cfg = write_cfg(tmp_path, SMALL_SWEEP)
        code, out = run_cli(tmp_path, "analytic", "--config", cfg)
        assert code == 0
        csv = (out / "analytic_M60.csv").read_text().splitlines()
        assert csv[0] == "L_km,n_l_opt,T_s_ms,P_s_repeater,P_direct,ratio"
        assert len(csv) == 1 + 4
        manifest = json.loads((out / "manifest.json").read_text())
        assert manifest["subcommand"] == "analytic"
        assert "analytic_M60.csv" in manifest["outputs"]
        assert (out / "timing.json").exists()

    def test_single_point_grid(self, tmp_path):
        cfg = write_cfg(tmp_path, "[sweep]\nl_min_km = 100\nl_max_km = 100\n"
                                  "l_step_km = 50\nm_s_values = 3\n")
        code, out = run_cli(tmp_path, "analytic", "--config", cfg)
        assert code == 0
        assert len((out / "analytic_M60.csv").read_text().splitlines()) == 2

    def test_empty_grid_is_usage_error(self, tmp_path):
        cfg = write_cfg(tmp_path, "[sweep]\nl_min_km = 100\nl_max_km = 50\n")
        code, _ = run_cli(tmp_path, "analytic", "--config", cfg)
        assert code == 2

    def test_default_three_curves(self, tmp_path):
        cfg = write_cfg(tmp_path, "[sweep]\nl_min_km = 100\nl_max_km = 200\n"
                                  "l_step_km = 100\n")
        code, out = run_cli(tmp_path, "analytic", "--config", cfg)
        assert code == 0
        for m in (60, 200, 2000):
            assert (out / f"analytic_M{m}.csv").exists()

    def test_byte_identical_across_runs_and_threads(self, tmp_path):
        cfg = write_cfg(tmp_path, SMALL_SWEEP)
        _, out1 = run_cli(tmp_path / "a", "analytic", "--config", cfg)
        code = main(["analytic", "--config", cfg, "--out-dir",
                     str(tmp_path / "b"), "--threads", "3"])
        assert code == 0
        a = (out1 / "analytic_M60.csv").read_bytes()
        b = (tmp_path / "b" / "analytic_M60.csv").read_bytes()
        assert a == b


class TestHeatmap:
    def test_grid_plus_marker_rows(self, tmp_path):
        cfg = write_cfg(tmp_path, SMALL_SWEEP + "\n[multiplexing]\nm_s = 3\n")
        code, out = run_cli(tmp_path, "heatmap", "--config", cfg)
        assert code == 0
        rows = (out / "heatmap_M60.csv").read_text().splitlines()
        assert rows[0] == "T2_ms,eta_o,ratio"
        assert len(rows) == 1 + 9 + 2  # 3x3 grid + star + triangle
        star = rows[-2].split(",")
        assert float(star[0]) == pytest.approx(0.804)
        assert float(star[1]) == pytest.approx(0.2305)


class TestMc:
    def test_summary_and_stream(self, tmp_path):
        cfg = write_cfg(tmp_path, SMALL_MC)
        code, out = run_cli(tmp_path, "mc", "--config", cfg)
        assert code == 0
        rows = (out / "mc_summary.csv").read_text().splitlines()
        assert rows[0] == "n_cycles,successes,frequency,stderr,analytic_P_s,z_score"
        vals = rows[1].split(",")
        assert int(vals[0]) == 20000
        assert abs(float(vals[5])) <= 4.0
        lines = (out / "mc_outcomes.jsonl").read_text().splitlines()
        assert len(lines) == 5
        assert list(json.loads(lines[0]).keys())[0] == "heralded"

    def test_seed_reproducibility(self, tmp_path):
        cfg = write_cfg(tmp_path, SMALL_MC)
        _, out1 = run_cli(tmp_path / "a", "mc", "--config", cfg)
        _, out2 = run_cli(tmp_path / "b", "mc", "--config", cfg)
        assert (out1 / "mc_summary.csv").read_bytes() == \
               (out2 / "mc_summary.csv").read_bytes()

    def test_seed_flag_overrides(self, tmp_path):
        cfg = write_cfg(tmp_path, SMALL_MC)
        _, out1 = run_cli(tmp_path / "a", "mc", "--config", cfg)
        code = main(["mc", "--config", cfg, "--seed", "99",
                     "--out-dir", str(tmp_path / "b")])
        assert code == 0
        assert (out1 / "mc_summary.csv").read_bytes() != \
               (tmp_path / "b" / "mc_summary.csv").read_bytes()

    def test_threads_do_not_change_bytes(self, tmp_path):
        cfg = write_cfg(tmp_path, SMALL_MC)
        _, out1 = run_cli(tmp_path / "a", "mc", "--config", cfg)
        main(["mc", "--config", cfg, "--out-dir", str(tmp_path / "b"),
              "--threads", "4"])
        assert (out1 / "mc_summary.csv").read_bytes() == \
               (tmp_path / "b" / "mc_summary.csv").read_bytes()

    def test_zero_cycles_rejected(self, tmp_path):
        cfg = write_cfg(tmp_path, "[mc]\nn_cycles = 0\n")
        code, _ = run_cli(tmp_path, "mc", "--config", cfg)
        assert code == 2


class TestPulse:
    def test_single_mode_run(self, tmp_path):
        cfg = write_cfg(tmp_path, SMALL_PULSE)
        code, out = run_cli(tmp_path, "pulse", "--config", cfg)
        assert code == 0
        trace = (out / "trace.csv").read_text().splitlines()
        assert trace[0] == "t_s,intensity,re_S,im_S"
        meta = json.loads((out / "trace_meta.json").read_text())
        assert meta["pulses"][0]["adiabaticity_q"] >= 10.0
        metrics = json.loads((out / "metrics.json").read_text())
        echo = metrics["echoes"][0]
        assert echo["peak_time_s"] == pytest.approx(180e-6, abs=0.5e-6)
        assert not echo["absent"]

    def test_zero_amplitude_cp_reports_absent_echo(self, tmp_path):
        cfg = write_cfg(tmp_path, SMALL_PULSE + "a0_rad_s = 1e-6\n")
        code, out = run_cli(tmp_path, "pulse", "--config", cfg)
        assert code == 0
        metrics = json.loads((out / "metrics.json").read_text())
        assert metrics["echoes"][0]["absent"]

    def test_bad_timing_rule_warns(self, tmp_path):
        cfg = write_cfg(tmp_path,
                        "[pulse]\nmode = single\nn_atoms = 201\n"
                        "tau1_us = 80\ntau2_us = 100\n")
        with pytest.warns(UserWarning, match="2\\*tau1"):
            code, _ = run_cli(tmp_path, "pulse", "--config", cfg)
        assert code == 0

    def test_jitter_outputs(self, tmp_path):
        cfg = write_cfg(tmp_path, SMALL_PULSE +
                        "jitter_sigma_khz = 30\njitter_cycles = 4\nseed = 3\n")
        code, out = run_cli(tmp_path, "pulse", "--config", cfg)
        assert code == 0
        assert (out / "trace_jitter_avg.csv").exists()
        metrics = json.loads((out / "metrics.json").read_text())
        assert metrics["jitter"]["averaged_fwhm_s"] > 0


class TestFit:
    def test_bundled_fixture_recovers_parameters(self, tmp_path):
        fixture = Path(__file__).resolve().parents[1] / "src/chirpecho/data/efficiency_decay_points.csv"
        code, out = run_cli(tmp_path, "fit", str(fixture), "--model", "exp4")
        assert code == 0
        rep = json.loads((out / "fit_report.json").read_text())
        assert rep["model"] == "exp4"
        assert rep["params"]["eta_o"] == pytest.approx(reference.ETA_O_FIT, rel=1e-6)
        assert rep["params"]["t2"] == pytest.approx(
            reference.T2_EFFICIENCY_FIT_S, rel=1e-6)
        curve = (out / "fit_curve.csv").read_text().splitlines()
        assert curve[0] == "t_s,value"

    def test_timestamp_input_for_t1(self, tmp_path):
        rng = np.random.default_rng(4)
        ts = rng.exponential(reference.T1_S, 40000)
        p = tmp_path / "stamps.txt"
        p.write_text("\n".join(f"{t:.9e}" for t in ts))
        cfg = write_cfg(tmp_path, "[fit]\nbin_width_us = 500\n")
        code, out = run_cli(tmp_path, "fit", str(p), "--model", "exp_t1",
                            "--config", cfg)
        assert code == 0
        rep = json.loads((out / "fit_report.json").read_text())
        assert rep["params"]["t1"] == pytest.approx(reference.T1_S, rel=0.1)

    def test_malformed_csv_reports_line(self, tmp_path, capsys):
        p = tmp_path / "bad.csv"
        p.write_text("t_s,eta\n1e-4,0.2\noops,0.1\n")
        code, _ = run_cli(tmp_path, "fit", str(p), "--model", "exp4")
        assert code == 2
        assert "line 3" in capsys.readouterr().err

    def test_unknown_model_is_usage_error(self, tmp_path):
        fixture = Path(__file__).resolve().parents[1] / "src/chirpecho/data/efficiency_decay_points.csv"
        with pytest.raises(SystemExit) as exc:
            main(["fit", str(fixture), "--model", "nope",
                  "--out-dir", str(tmp_path)])
        assert exc.value.code == 2

    def test_missing_input_is_config_error(self, tmp_path):
        code, _ = run_cli(tmp_path, "fit", str(tmp_path / "nothere.csv"))
        assert code == 2

    def test_degenerate_fit_is_runtime_error(self, tmp_path):
        p = tmp_path / "zeros.csv"
        p.write_text("t_s,eta\n1e-4,0\n2e-4,0\n3e-4,0\n")
        code, _ = run_cli(tmp_path, "fit", str(p), "--model", "exp4")
        assert code == 3


class TestUsage:
    def test_no_subcommand(self):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2

    def test_missing_config_file(self, tmp_path):
        code, _ = run_cli(tmp_path, "analytic", "--config",
                          str(tmp_path / "none.cfg"))
        assert code == 2

    def test_no_partial_files_after_success(self, tmp_path):
        cfg = write_cfg(tmp_path, SMALL_SWEEP)
        _, out = run_cli(tmp_path, "analytic", "--config", cfg)
        assert not list(out.glob("*.partial"))
