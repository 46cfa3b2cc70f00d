"""Discrete-event Monte Carlo of the multiplexed repeater protocol.

Each cycle draws, for every elementary link, one Bernoulli trial per
spectral-temporal mode; a link heralds if at least one mode succeeds and the
lowest (spectral, temporal) index is recalled. If all links herald, the 2*n_l
memories are recalled after the round-trip storage time, the retrieved photons
are detected, and the n_l-1 swap measurements each succeed with probability
one half.

Randomness is counter based: cycle i consumes exactly ``draws_per_cycle``
uniform doubles taken from the slice [i*D, (i+1)*D) of a single PCG64 stream,
so any partition of cycles over chunks or threads reproduces identical
outcomes bit for bit.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .repeater import (LinkConfig, MemoryModel, RepeaterParams,
                       memory_efficiency, per_mode_link_success,
                       required_storage_time, success_probability)

DEFAULT_CHANNEL_SPACING_HZ = 4.0e6


@dataclass(frozen=True)
class RngSpec:
    """Master seed plus the index of the per-cycle stream slice."""

    seed: int
    stream: int = 0

    def __post_init__(self):
        if self.stream < 0:
            raise ParameterError("stream must be >= 0")


@dataclass(frozen=True)
class ModeAddress:
    spectral: int
    temporal: int


@dataclass(frozen=True)
class CycleOutcome:
    heralded: tuple          # per link: ModeAddress or None
    storage_time_s: float    # per-memory storage duration (equal for all)
    recall_ok: tuple         # 2*n_l flags
    detect_ok: tuple         # 2*n_l flags
    bsm_ok: tuple            # n_l - 1 flags
    success: bool
    frequency_shifts_hz: tuple  # one per recalled memory pair, per link

    def consistent(self) -> bool:
        return self.success == (all(m is not None for m in self.heralded)
                                and all(self.recall_ok) and all(self.detect_ok)
                                and all(self.bsm_ok))


def draws_per_cycle(link: LinkConfig, params: RepeaterParams) -> int:
    n = link.n_links
    return n * params.modes + 2 * n + 2 * n + (n - 1)


def _cycle_arrays(u, params: RepeaterParams, mem: MemoryModel, link: LinkConfig,
                  tie_break: str = "low"):
    """Vectorized outcome pieces from uniforms u of shape (B, draws_per_cycle)."""
    n, m = link.n_links, params.modes
    p = per_mode_link_success(params, link)
    ts = required_storage_time(params, link)
    eta_m = memory_efficiency(mem, ts)

    mode_u = u[:, :n * m].reshape(-1, n, m)
    hits = mode_u < p
    heralded = hits.any(axis=2)
    if tie_break == "low":
        first = np.argmax(hits, axis=2)
    elif tie_break == "high":
        first = m - 1 - np.argmax(hits[:, :, ::-1], axis=2)
    else:
        raise ParameterError(f"unknown tie_break {tie_break!r}")
    first = np.where(heralded, first, -1)

    k = n * m
    recall = u[:, k:k + 2 * n] < eta_m
    detect = u[:, k + 2 * n:k + 4 * n] < params.eta_d_s
    bsm = u[:, k + 4 * n:k + 5 * n - 1] < 0.5
    success = (heralded.all(axis=1) & recall.all(axis=1)
               & detect.all(axis=1) & bsm.all(axis=1))
    return heralded, first, recall, detect, bsm, success, ts


def _uniforms(rng: RngSpec, start_cycle: int, n_cycles: int, d: int) -> np.ndarray:
    bg = np.random.PCG64(rng.seed)
    bg.advance((rng.stream + start_cycle) * d)
    return np.random.Generator(bg).random((n_cycles, d))


def simulate_cycle(params: RepeaterParams, mem: MemoryModel, link: LinkConfig,
                   rng: RngSpec, tie_break: str = "low",
                   channel_spacing_hz: float = DEFAULT_CHANNEL_SPACING_HZ,
                   reference_spectral_index: int = 0) -> CycleOutcome:
    """Simulate one protocol cycle on the stream slice named by ``rng``."""
    d = draws_per_cycle(link, params)
    u = _uniforms(rng, 0, 1, d)
    heralded, first, recall, detect, bsm, success, ts = _cycle_arrays(
        u, params, mem, link, tie_break)
    modes = []
    shifts = []
    for j in range(link.n_links):
        if heralded[0, j]:
            flat = int(first[0, j])
            addr = ModeAddress(flat // params.m_t, flat % params.m_t)
            modes.append(addr)
            shifts.append((addr.spectral - reference_spectral_index) * channel_spacing_hz)
        else:
            modes.append(None)
            shifts.append(0.0)
    return CycleOutcome(tuple(modes), ts, tuple(bool(x) for x in recall[0]),
                        tuple(bool(x) for x in detect[0]),
                        tuple(bool(x) for x in bsm[0]), bool(success[0]),
                        tuple(shifts))


@dataclass(frozen=True)
class EstimateResult:
    n_cycles: int
    successes: int
    frequency: float
    stderr: float
    herald_counts: np.ndarray  # (n_links, m_s, m_t) heralded-mode histogram
    link_herald_counts: np.ndarray  # (n_links,) cycles in which each link heralded
    analytic_p: float

    @property
    def z_score(self) -> float:
        scale = np.sqrt(self.analytic_p * (1.0 - self.analytic_p) / self.n_cycles)
        if scale == 0.0:
            return 0.0
        return (self.frequency - self.analytic_p) / scale


def estimate_success(params: RepeaterParams, mem: MemoryModel, link: LinkConfig,
                     n_cycles: int, rng: RngSpec, threads: int = 1,
                     tie_break: str = "low") -> EstimateResult:
    """Empirical success frequency over ``n_cycles`` independent cycles."""
    if n_cycles < 1:
        raise ParameterError(f"n_cycles={n_cycles} must be >= 1")
    d = draws_per_cycle(link, params)
    n, m = link.n_links, params.modes
    # Chunk size balances RNG-batch overhead against memory (~32 MB of draws).
    chunk = max(1, min(65536, (4 << 20) // d))
    starts = list(range(0, n_cycles, chunk))

    def _run(start):
        count = min(chunk, n_cycles - start)
        u = _uniforms(rng, start, count, d)
        heralded, first, _, _, _, success, _ = _cycle_arrays(u, params, mem, link, tie_break)
        hist = np.zeros((n, m), dtype=np.int64)
        for j in range(n):
            sel = first[:, j][heralded[:, j]]
            if sel.size:
                hist[j] += np.bincount(sel, minlength=m)
        return int(success.sum()), hist, heralded.sum(axis=0)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(_run, starts))
    else:
        parts = [_run(s) for s in starts]

    successes = sum(p[0] for p in parts)
    hist = np.sum([p[1] for p in parts], axis=0)
    link_counts = np.sum([p[2] for p in parts], axis=0)
    freq = successes / n_cycles
    stderr = float(np.sqrt(freq * (1.0 - freq) / n_cycles))
    analytic = success_probability(params, mem, link)
    return EstimateResult(n_cycles, successes, freq, stderr,
                          hist.reshape(n, params.m_s, params.m_t),
                          link_counts, analytic)


def iter_outcomes(params: RepeaterParams, mem: MemoryModel, link: LinkConfig,
                  n_cycles: int, rng: RngSpec,
                  channel_spacing_hz: float = DEFAULT_CHANNEL_SPACING_HZ):
    """Yield CycleOutcome for cycles 0..n_cycles-1 (same draws as the estimator)."""
    for i in range(n_cycles):
        yield simulate_cycle(params, mem, link, RngSpec(rng.seed, rng.stream + i),
                             channel_spacing_hz=channel_spacing_hz)


def outcome_to_json(outcome: CycleOutcome) -> str:
    """One JSON line with fields in fixed order."""
    rec = {
        "heralded": [None if m is None else [m.spectral, m.temporal]
                     for m in outcome.heralded],
        "storage_time_s": outcome.storage_time_s,
        "recall_ok": list(outcome.recall_ok),
        "detect_ok": list(outcome.detect_ok),
        "bsm_ok": list(outcome.bsm_ok),
        "success": outcome.success,
        "frequency_shifts_hz": list(outcome.frequency_shifts_hz),
    }
    return json.dumps(rec, separators=(",", ":"))


@dataclass(frozen=True)
class StorageAudit:
    n_outcomes: int
    max_storage_s: float
    mean_storage_s: float
    budget_s: float
    exceed_fraction: float


def storage_time_audit(outcomes, mem: MemoryModel,
                       efficiency_floor: float = 0.01) -> StorageAudit:
    """Report storage durations against the memory budget where
    memory_efficiency(budget) == efficiency_floor."""
    outcomes = list(outcomes)
    if not outcomes:
        raise ParameterError("storage_time_audit needs at least one outcome")
    durations = np.array([o.storage_time_s for o in outcomes])
    if efficiency_floor <= 0.0:
        budget = float("inf")
    elif efficiency_floor >= mem.eta_o:
        budget = 0.0
    else:
        budget = (mem.t2 / 4.0) * np.log(mem.eta_o / efficiency_floor)
    exceed = float(np.mean(durations > budget))
    return StorageAudit(len(outcomes), float(durations.max()),
                        float(durations.mean()), float(budget), exceed)
