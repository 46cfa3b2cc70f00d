"""Command-line interface: analytic sweeps, Monte Carlo, pulse engine, fits.

Every run writes its outputs plus ``manifest.json`` (the resolved config,
seed, code version and output list; fully deterministic) and ``timing.json``
(wall-clock data, kept separate so output bytes depend only on config and
seed). Exit codes: 0 success, 2 usage or config error, 3 runtime or fit
failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import FIT_MODELS, bin_timestamps, evaluate_model, fit_t1
from .config import Config, defaults, load_config
from .errors import ChirpEchoError, ConfigError, ScheduleError
from .montecarlo import (LinkConfig, RngSpec, estimate_success, iter_outcomes,
                         outcome_to_json)
from .output import fmt, write_csv, write_json, write_lines
from .repeater import (DistanceRow, MemoryModel, RepeaterParams, SweepSpec,
                       direct_transmission_probability, optimize_links,
                       sweep_distance, sweep_ratio_heatmap)
from . import memory as mem_engine


def _params_from(cfg: Config, m_s: int | None = None) -> RepeaterParams:
    return RepeaterParams(
        rho=cfg.get("source", "rho"), alpha=cfg.get("channel", "alpha"),
        beta=cfg.get("detectors", "beta"), eta_d_i=cfg.get("detectors", "eta_d_i"),
        eta_d_s=cfg.get("detectors", "eta_d_s"), m_t=cfg.get("multiplexing", "m_t"),
        m_s=int(m_s if m_s is not None else cfg.get("multiplexing", "m_s")),
        v=cfg.get("channel", "v"), nu=cfg.get("source", "nu"))


def _memory_from(cfg: Config) -> MemoryModel:
    m = cfg["memory"]
    return MemoryModel(m["eta_o"], m["t2"], m["t1"], m["noise_scale"])


def _write_manifest(out_dir: Path, subcommand: str, cfg: Config, seed,
                    outputs, threads: int, t0: float, started: str):
    # manifest bytes depend only on (config, seed); wall-clock facts and the
    # thread cap live in timing.json, which is excluded from byte identity
    manifest = {
        "subcommand": subcommand,
        "version": __version__,
        "seed": seed,
        "config": cfg.sections,
        "outputs": [str(p.name) for p in outputs],
    }
    paths = [write_json(out_dir / "manifest.json", manifest)]
    paths.append(write_json(out_dir / "timing.json", {
        "started_utc": started, "duration_s": time.monotonic() - t0,
        "threads": threads}))
    return paths


def cmd_analytic(cfg: Config, out_dir: Path, threads: int, seed) -> list:
    sw = cfg["sweep"]
    lo, hi, step = sw["l_min_km"], sw["l_max_km"], sw["l_step_km"]
    if step <= 0 or hi < lo:
        raise ConfigError("sweep grid needs l_step_km > 0 and l_max_km >= l_min_km")
    distances = tuple(np.arange(lo, hi + step / 2, step))
    if len(distances) == 0:
        raise ConfigError("empty distance grid")
    outputs = []
    for m_s in sw["m_s_values"]:
        params = _params_from(cfg, int(m_s))
        mem = _memory_from(cfg)
        if len(distances) == 1:
            length = distances[0]
            opt = optimize_links(params, mem, length, sw["n_max"])
            p_dir = direct_transmission_probability(params, length)
            rows = [DistanceRow(length, opt.n_links, opt.storage_time,
                                opt.p_success, p_dir,
                                opt.p_success / p_dir if p_dir > 0 else float("inf"),
                                False)]
        else:
            spec = SweepSpec(params=params, mem=mem, distances_km=distances,
                             n_max=sw["n_max"], nu_repeater=cfg.get("source", "nu"),
                             nu_direct=sw["nu_direct"])
            rows = sweep_distance(spec, threads)
        m_total = params.modes
        outputs.append(write_csv(
            out_dir / f"analytic_M{m_total}.csv",
            ["L_km", "n_l_opt", "T_s_ms", "P_s_repeater", "P_direct", "ratio"],
            [(r.length_km, r.n_links_opt, r.storage_time_s * 1e3,
              r.p_repeater, r.p_direct, r.ratio) for r in rows]))
    return outputs


def cmd_heatmap(cfg: Config, out_dir: Path, threads: int, seed) -> list:
    sw = cfg["sweep"]
    t2 = tuple(np.linspace(sw["t2_min_ms"], sw["t2_max_ms"], sw["t2_points"]) * 1e-3)
    eta = tuple(np.linspace(sw["eta_o_min"], sw["eta_o_max"], sw["eta_o_points"]))
    outputs = []
    for m_s in sw["m_s_values"]:
        params = _params_from(cfg, int(m_s))
        spec = SweepSpec(params=params, mem=_memory_from(cfg), t2_grid_s=t2,
                         eta_o_grid=eta, heatmap_length_km=sw["heatmap_l_km"],
                         n_max=sw["n_max"])
        cells = sweep_ratio_heatmap(spec, threads)
        outputs.append(write_csv(
            out_dir / f"heatmap_M{params.modes}.csv",
            ["T2_ms", "eta_o", "ratio"],
            [(c.t2_s * 1e3, c.eta_o, c.ratio) for c in cells]))
    return outputs


def cmd_mc(cfg: Config, out_dir: Path, threads: int, seed) -> list:
    mc = cfg["mc"]
    if mc["n_cycles"] < 1:
        raise ConfigError("mc.n_cycles must be >= 1")
    params = _params_from(cfg)
    mem = _memory_from(cfg)
    link = LinkConfig(mc["l_km"], mc["n_links"])
    rng = RngSpec(int(seed if seed is not None else mc["seed"]))
    est = estimate_success(params, mem, link, mc["n_cycles"], rng, threads)
    outputs = [write_csv(
        out_dir / "mc_summary.csv",
        ["n_cycles", "successes", "frequency", "stderr", "analytic_P_s", "z_score"],
        [(est.n_cycles, est.successes, est.frequency, est.stderr,
          est.analytic_p, est.z_score)])]
    n_stream = int(mc["stream_outcomes"])
    if n_stream > 0:
        lines = (outcome_to_json(o) for o in iter_outcomes(
            params, mem, link, min(n_stream, mc["n_cycles"]), rng,
            channel_spacing_hz=mc["channel_spacing_hz"]))
        outputs.append(write_lines(out_dir / "mc_outcomes.jsonl", lines))
    return outputs


def _build_schedule(cfg: Config):
    p = cfg["pulse"]
    preset_idx = int(p["preset"])
    if not 1 <= preset_idx <= len(mem_engine.BANDWIDTH_PRESETS):
        raise ConfigError(f"pulse.preset must be 1..{len(mem_engine.BANDWIDTH_PRESETS)}")
    preset = mem_engine.BANDWIDTH_PRESETS[preset_idx - 1]
    mode = p["mode"]
    common = dict(amplitude=p["amplitude"], n_atoms=int(p["n_atoms"]))
    a0 = p["a0_rad_s"] or None
    if mode == "single":
        return mem_engine.single_mode_schedule(
            preset, tau1=p["tau1_us"] * 1e-6, tau2=p["tau2_us"] * 1e-6,
            a0=a0, **common)
    if mode == "train":
        return mem_engine.temporal_train_schedule(
            n_modes=int(p["n_modes"]), spacing=p["mode_spacing_us"] * 1e-6,
            storage_time=p["storage_time_us"] * 1e-6, preset=preset, **common)
    if mode == "spectral":
        return mem_engine.spectral_multimode_schedule(
            n_temporal=int(p["n_modes"]), n_cells=int(p["n_cells"]),
            cell_spacing_hz=p["cell_spacing_mhz"] * 1e6,
            storage_time=p["storage_time_us"] * 1e-6,
            recall_cell=int(p["recall_cell"]), preset=preset,
            spacing=p["mode_spacing_us"] * 1e-6, **common)
    if mode == "sequential":
        return mem_engine.sequential_recall_schedule(
            recall_times=tuple(t * 1e-6 for t in p["recall_times_us"]),
            n_inputs=int(p["n_modes"]),
            spacing=p["mode_spacing_us"] * 1e-6,
            cell_spacing_hz=p["cell_spacing_mhz"] * 1e6, preset=preset, **common)
    raise ConfigError(f"unknown pulse.mode {mode!r}")


def cmd_pulse(cfg: Config, out_dir: Path, threads: int, seed) -> list:
    p = cfg["pulse"]
    schedule, cells = _build_schedule(cfg)
    mem = _memory_from(cfg)
    res = mem_engine.run_sequence(schedule, cells, mem,
                                  dt_out=p["dt_out_us"] * 1e-6)
    trace = res.trace
    outputs = [write_csv(
        out_dir / "trace.csv", ["t_s", "intensity", "re_S", "im_S"],
        [(t, i, s.real, s.imag) for t, i, s in
         zip(trace.times, trace.intensity, trace.coherence)])]

    ref_energy = mem_engine.input_reference_energy(trace)
    echoes = mem_engine.echo_metrics(trace, ref_energy)
    last_cp_end = max(pl["t_start_s"] + pl["tau_cp_s"]
                      for pl in trace.metadata["pulses"])
    metrics = {"reference_input_energy": ref_energy, "echoes": []}
    for em in echoes:
        w = em.window
        noise = mem_engine.noise_model(res.final_populations, res.weight, mem,
                                       (w.start, w.end), t_ref=last_cp_end)
        metrics["echoes"].append({
            "window": w.label, "cell": w.cell, "center_s": w.center,
            "peak_time_s": em.peak_time, "energy": em.energy,
            "efficiency_proxy": em.efficiency_proxy, "fwhm_s": em.fwhm,
            "absent": em.absent, "noise_counts": noise,
            "snr_proxy": mem_engine.snr_estimate(em.energy, noise)})
    if res.cell_index.max() > 0:
        energy_by_cell = []
        for i in range(int(res.cell_index.max()) + 1):
            e = sum(trace.window_energy(w, cell=i) for w in trace.select("echo"))
            energy_by_cell.append(e)
        metrics["echo_energy_by_cell"] = energy_by_cell

    sigma = p["jitter_sigma_khz"] * 1e3
    n_jit = int(p["jitter_cycles"])
    if sigma > 0.0 and n_jit > 1:
        jr = mem_engine.run_jitter_average(
            schedule, cells, mem, sigma, n_jit,
            int(seed if seed is not None else p["seed"]),
            dt_out=p["dt_out_us"] * 1e-6)
        outputs.append(write_csv(out_dir / "trace_jitter_avg.csv",
                                 ["t_s", "mean_intensity"],
                                 list(zip(jr.times, jr.mean_intensity))))
        metrics["jitter"] = {
            "sigma_hz": sigma, "cycles": n_jit,
            "single_shot_fwhm_s": [float(x) for x in jr.single_fwhm],
            "averaged_fwhm_s": jr.averaged_fwhm,
            "echo_center_spread_s": float(np.std(jr.echo_centers)),
        }

    outputs.append(write_json(out_dir / "trace_meta.json", {
        "windows": [{"kind": w.kind, "label": w.label, "center_s": w.center,
                     "start_s": w.start, "end_s": w.end, "cell": w.cell}
                    for w in trace.windows],
        **trace.metadata}))
    outputs.append(write_json(out_dir / "metrics.json", metrics))
    return outputs


def _read_fit_input(path: Path):
    """Two-column CSV (with or without header) or one timestamp per line."""
    rows = []
    timestamps = []
    is_csv = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = [p.strip() for p in line.split(",")]
            if is_csv is None:
                is_csv = len(parts) >= 2
            try:
                if is_csv:
                    if len(parts) < 2:
                        raise ValueError("expected two columns")
                    rows.append((float(parts[0]), float(parts[1])))
                else:
                    timestamps.append(float(parts[0]))
            except ValueError:
                if lineno == 1:
                    continue  # header row
                raise ConfigError(f"{path}: line {lineno}: cannot parse {line!r}")
    return (np.asarray(rows), None) if is_csv else (None, np.asarray(timestamps))


def cmd_fit(cfg: Config, out_dir: Path, threads: int, seed,
            input_path: str = "", model: str = "") -> list:
    ft = cfg["fit"]
    model = model or ft["model"]
    if model not in FIT_MODELS:
        raise ConfigError(f"unknown fit model {model!r}; choose from "
                          f"{sorted(FIT_MODELS)}")
    path = Path(input_path)
    if not path.exists():
        raise ConfigError(f"fit input {path} does not exist")
    rows, timestamps = _read_fit_input(path)
    if rows is None:
        if model != "exp_t1":
            raise ConfigError("timestamp input is only meaningful for exp_t1")
        hist, dropped = bin_timestamps(timestamps, ft["bin_width_us"] * 1e-6)
        rows = np.stack([hist.centers, hist.counts.astype(float)], axis=1)
    if model == "exp_t1":
        fit = fit_t1(rows, background=ft["background"])
    else:
        fit = FIT_MODELS[model](rows)
    report = {
        "model": fit.model,
        "params": {k: fmt_float(v) for k, v in fit.params.items()},
        "sigmas": {k: fmt_float(v) for k, v in fit.sigmas.items()},
        "residual_norm": fit.residual_norm,
        "cov_condition": fmt_float(fit.cov_condition),
        "n_iterations": fit.n_iterations,
        "unbounded": list(fit.unbounded),
        "n_points": int(len(rows)),
        "input": path.name,
    }
    outputs = [write_json(out_dir / "fit_report.json", report)]
    x = np.asarray(rows)[:, 0]
    grid = np.linspace(x.min(), x.max(), 200)
    curve = evaluate_model(fit, grid)
    outputs.append(write_csv(out_dir / "fit_curve.csv", ["t_s", "value"],
                             list(zip(grid, curve))))
    outputs.append(write_csv(out_dir / "fit_points.csv", ["t_s", "value"],
                             [tuple(r) for r in np.asarray(rows)]))
    return outputs


def fmt_float(v):
    """JSON-safe float (inf -> string sentinel)."""
    if isinstance(v, float) and not np.isfinite(v):
        return "inf" if v > 0 else "-inf"
    return v


COMMANDS = {
    "analytic": cmd_analytic,
    "heatmap": cmd_heatmap,
    "mc": cmd_mc,
    "pulse": cmd_pulse,
    "fit": cmd_fit,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="config file path")
    common.add_argument("--seed", type=int, default=None,
                        help="override the RNG seed from the config")
    common.add_argument("--out-dir", default=".", help="output directory")
    common.add_argument("--threads", type=int, default=1,
                        help="cap engine parallelism (outputs are invariant)")
    parser = argparse.ArgumentParser(
        prog="chirpecho",
        description="Multiplexed-repeater rate model and chirped-pulse "
                    "photon-echo memory simulator")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("analytic", parents=[common],
                   help="distance sweep of repeater vs direct transmission")
    sub.add_parser("heatmap", parents=[common],
                   help="success-ratio heatmap over (T2, eta_o)")
    sub.add_parser("mc", parents=[common],
                   help="Monte Carlo validation of the analytic model")
    sub.add_parser("pulse", parents=[common],
                   help="pulse-level memory simulation")
    fit = sub.add_parser("fit", parents=[common], help="decay-curve fits")
    fit.add_argument("input", help="CSV of (t, value) rows or timestamps")
    fit.add_argument("--model", default="",
                     choices=["", "exp4", "mims", "exp_t1"],
                     help="override the model from the config")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    t0 = time.monotonic()
    started = datetime.now(timezone.utc).isoformat()
    try:
        cfg = load_config(args.config) if args.config else defaults()
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        if args.threads is not None and args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        kwargs = {}
        if args.command == "fit":
            kwargs = {"input_path": args.input, "model": args.model}
        outputs = COMMANDS[args.command](cfg, out_dir, args.threads,
                                         args.seed, **kwargs)
        _write_manifest(out_dir, args.command, cfg, args.seed, outputs,
                        args.threads, t0, started)
    except (ConfigError, ScheduleError) as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except ChirpEchoError as err:
        print(f"error: {err}", file=sys.stderr)
        return 3
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
