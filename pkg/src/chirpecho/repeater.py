"""Closed-form model of a spectro-temporally multiplexed quantum repeater.

The chain of total length L is split into n_l elementary links. Each cycle,
every link attempts entanglement swapping on M_s x M_t modes in parallel;
a link succeeds if at least one mode heralds. Signal photons wait in the
memories for the round-trip heralding time T_s = L / (n_l * v) and are then
recalled, detected and swapped between neighbouring links.

The overall success probability is

    P_s = [1 - (1 - p)^(M_s*M_t)]^n_l * (eta_d_s * eta_m)^(2*n_l) / 2^(n_l-1)

with p = 0.5 * (rho * t * eta_d_i)^beta the per-mode swap probability on one
link, t the fibre transmittance over half a link, and eta_m the memory
efficiency at the required storage time.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ParameterError

C_KM_S = 299792.458
FIBER_INDEX = 1.468
DEFAULT_VELOCITY_KM_S = C_KM_S / FIBER_INDEX  # SMF-28 group velocity


def _check(cond, msg):
    if not cond:
        raise ParameterError(msg)


@dataclass(frozen=True)
class RepeaterParams:
    """Source, channel, detector and multiplexing parameters.

    rho      : pair-generation probability per mode, in [0, 1]
    alpha    : fibre loss coefficient (dB/km)
    beta     : detection-scheme exponent (>= 1, integer)
    eta_d_i  : idler detection efficiency, in [0, 1]
    eta_d_s  : signal detection efficiency, in [0, 1]
    m_t, m_s : temporal / spectral multimode capacity (>= 1)
    v        : signal velocity in fibre (km/s)
    nu       : repetition rate of the storage cycle (Hz)
    """

    rho: float = 0.9
    alpha: float = 0.21
    beta: int = 2
    eta_d_i: float = 0.9
    eta_d_s: float = 0.9
    m_t: int = 20
    m_s: int = 3
    v: float = DEFAULT_VELOCITY_KM_S
    nu: float = 1.0

    def __post_init__(self):
        _check(0.0 <= self.rho <= 1.0, f"rho={self.rho} outside [0,1]")
        _check(self.alpha >= 0.0, f"alpha={self.alpha} must be >= 0")
        _check(int(self.beta) == self.beta and self.beta >= 1,
               f"beta={self.beta} must be a positive integer")
        _check(0.0 <= self.eta_d_i <= 1.0, f"eta_d_i={self.eta_d_i} outside [0,1]")
        _check(0.0 <= self.eta_d_s <= 1.0, f"eta_d_s={self.eta_d_s} outside [0,1]")
        _check(int(self.m_t) == self.m_t and self.m_t >= 1, f"m_t={self.m_t} must be >= 1")
        _check(int(self.m_s) == self.m_s and self.m_s >= 1, f"m_s={self.m_s} must be >= 1")
        _check(self.v > 0.0, f"v={self.v} must be > 0")
        _check(self.nu > 0.0, f"nu={self.nu} must be > 0")

    @property
    def modes(self) -> int:
        return int(self.m_s) * int(self.m_t)


@dataclass(frozen=True)
class MemoryModel:
    """Memory efficiency law and decay/noise scales.

    eta_o       : efficiency in the zero-storage-time limit, in [0, 1]
    t2          : coherence time (s); efficiency decays as eta_o*exp(-4*T_s/t2)
    t1          : excited-state lifetime (s), drives spontaneous-emission noise
    noise_scale : expected noise counts per second per unit residual excitation
    """

    eta_o: float = 0.65
    t2: float = 3.0e-3
    t1: float = 10.68e-3
    noise_scale: float = 0.0

    def __post_init__(self):
        _check(0.0 <= self.eta_o <= 1.0, f"eta_o={self.eta_o} outside [0,1]")
        _check(self.t2 > 0.0, f"t2={self.t2} must be > 0")
        _check(self.t1 > 0.0, f"t1={self.t1} must be > 0")
        _check(self.noise_scale >= 0.0, f"noise_scale={self.noise_scale} must be >= 0")


@dataclass(frozen=True)
class LinkConfig:
    total_length: float  # km
    n_links: int

    def __post_init__(self):
        _check(self.total_length >= 0.0, f"total_length={self.total_length} must be >= 0")
        _check(int(self.n_links) == self.n_links and self.n_links >= 1,
               f"n_links={self.n_links} must be a positive integer")


def half_link_transmittance(params: RepeaterParams, link: LinkConfig) -> float:
    """Fibre transmittance over half an elementary link, 10^(-alpha*(L/2n)/10)."""
    exponent = params.alpha * (link.total_length / (2.0 * link.n_links)) / 10.0
    return 10.0 ** (-exponent)


def per_mode_link_success(params: RepeaterParams, link: LinkConfig) -> float:
    """Probability that one mode heralds on one link: 0.5*(rho*t*eta_d_i)^beta."""
    t = half_link_transmittance(params, link)
    return 0.5 * (params.rho * t * params.eta_d_i) ** params.beta


def memory_efficiency(mem: MemoryModel, storage_time: float) -> float:
    """eta_o * exp(-4*T_s/T2) for a storage time T_s in seconds."""
    if storage_time < 0.0:
        raise ParameterError(f"storage_time={storage_time} must be >= 0")
    return mem.eta_o * np.exp(-4.0 * storage_time / mem.t2)


def required_storage_time(params: RepeaterParams, link: LinkConfig) -> float:
    """Round-trip heralding time over one link, T_s = L/(n_l*v), in seconds."""
    return link.total_length / (link.n_links * params.v)


def success_probability(params: RepeaterParams, mem: MemoryModel, link: LinkConfig) -> float:
    """Entanglement-distribution success probability per cycle."""
    p = per_mode_link_success(params, link)
    ts = required_storage_time(params, link)
    eta_m = memory_efficiency(mem, ts)
    n = link.n_links
    herald = -np.expm1(params.modes * np.log1p(-p)) if p > 0.0 else 0.0
    return (herald ** n) * (params.eta_d_s * eta_m) ** (2 * n) / 2.0 ** (n - 1)


def direct_transmission_probability(params: RepeaterParams, total_length: float) -> float:
    """Benchmark: one source, idler over the full fibre, both photons detected."""
    if total_length < 0.0:
        raise ParameterError(f"total_length={total_length} must be >= 0")
    return (params.rho * 10.0 ** (-params.alpha * total_length / 10.0)
            * params.eta_d_i * params.eta_d_s)


def distribution_rate(params: RepeaterParams, p_s: float) -> float:
    """Entanglement distribution rate R = nu * P_s (Hz)."""
    if not 0.0 <= p_s <= 1.0:
        raise ParameterError(f"p_s={p_s} outside [0,1]")
    return params.nu * p_s


@dataclass(frozen=True)
class OptimalLinks:
    n_links: int
    p_success: float
    storage_time: float  # s


def optimize_links(params: RepeaterParams, mem: MemoryModel, total_length: float,
                   n_max: int = 64) -> OptimalLinks:
    """Exhaustive scan of n_l in [1, n_max]; ties break toward smaller n_l."""
    _check(n_max >= 1, f"n_max={n_max} must be >= 1")
    best_n, best_p = 1, -1.0
    for n in range(1, n_max + 1):
        p = success_probability(params, mem, LinkConfig(total_length, n))
        if p > best_p:
            best_n, best_p = n, p
    ts = required_storage_time(params, LinkConfig(total_length, best_n))
    return OptimalLinks(best_n, best_p, ts)


@dataclass(frozen=True)
class SweepSpec:
    """Grids and fixed parameters for the distance sweep and ratio heatmap.

    Exactly one family of axes is used per call: ``distances_km`` for
    sweep_distance, ``t2_grid_s`` x ``eta_o_grid`` for sweep_ratio_heatmap.
    Separate repetition rates for the repeater and the direct benchmark are
    carried but default to equal values.
    """

    params: RepeaterParams = field(default_factory=RepeaterParams)
    mem: MemoryModel = field(default_factory=MemoryModel)
    distances_km: tuple = ()
    t2_grid_s: tuple = ()
    eta_o_grid: tuple = ()
    heatmap_length_km: float = 500.0
    n_max: int = 64
    nu_repeater: float = 1.0
    nu_direct: float = 1.0

    def __post_init__(self):
        for name, grid in (("distances_km", self.distances_km),
                           ("t2_grid_s", self.t2_grid_s),
                           ("eta_o_grid", self.eta_o_grid)):
            g = np.asarray(grid, dtype=float)
            if g.size and not np.all(np.diff(g) > 0.0):
                raise ParameterError(f"{name} must be strictly increasing")
        if self.distances_km and len(self.distances_km) < 2:
            raise ParameterError("distances_km needs at least 2 points")
        for name, grid in (("t2_grid_s", self.t2_grid_s), ("eta_o_grid", self.eta_o_grid)):
            if grid and len(grid) < 2:
                raise ParameterError(f"{name} needs at least 2 points")
        _check(self.heatmap_length_km > 0.0, "heatmap_length_km must be > 0")
        _check(self.n_max >= 1, "n_max must be >= 1")


@dataclass(frozen=True)
class DistanceRow:
    length_km: float
    n_links_opt: int
    storage_time_s: float
    p_repeater: float
    p_direct: float
    ratio: float
    n_incremented: bool


def sweep_distance(spec: SweepSpec, threads: int = 1) -> list[DistanceRow]:
    """One row per distance; the repeater column is optimized over n_l."""
    if not spec.distances_km:
        raise ParameterError("SweepSpec.distances_km is empty")

    def _solve(length):
        opt = optimize_links(spec.params, spec.mem, length, spec.n_max)
        p_dir = direct_transmission_probability(spec.params, length)
        ratio = opt.p_success / p_dir if p_dir > 0.0 else float("inf")
        return opt, p_dir, ratio

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            solved = list(pool.map(_solve, spec.distances_km))
    else:
        solved = [_solve(length) for length in spec.distances_km]

    rows, prev_n = [], None
    for length, (opt, p_dir, ratio) in zip(spec.distances_km, solved):
        rows.append(DistanceRow(length, opt.n_links, opt.storage_time,
                                opt.p_success, p_dir, ratio,
                                prev_n is not None and opt.n_links > prev_n))
        prev_n = opt.n_links
    return rows


@dataclass(frozen=True)
class HeatmapCell:
    t2_s: float
    eta_o: float
    ratio: float
    marker: str = ""


# Demonstrated (star) and projected (triangle) memory working points for the
# heatmap overlay: (T2 seconds, eta_o).
HEATMAP_MARKERS = (("star", 804e-6, 0.2305), ("triangle", 3.0e-3, 0.65))


def sweep_ratio_heatmap(spec: SweepSpec, threads: int = 1,
                        markers=HEATMAP_MARKERS) -> list[HeatmapCell]:
    """Ratio P_s(repeater, optimized)/P_s(direct) over a (T2, eta_o) grid.

    Grid cells come first in row-major (T2 outer, eta_o inner) order, then one
    cell per marker point.
    """
    if not spec.t2_grid_s or not spec.eta_o_grid:
        raise ParameterError("SweepSpec.t2_grid_s / eta_o_grid are empty")
    length = spec.heatmap_length_km
    p_dir = direct_transmission_probability(spec.params, length)

    points = [(t2, eta, "") for t2 in spec.t2_grid_s for eta in spec.eta_o_grid]
    points += [(t2, eta, name) for name, t2, eta in markers]

    def _solve(point):
        t2, eta, name = point
        mem = replace(spec.mem, eta_o=eta, t2=t2)
        opt = optimize_links(spec.params, mem, length, spec.n_max)
        ratio = opt.p_success / p_dir if p_dir > 0.0 else float("inf")
        return HeatmapCell(t2, eta, ratio, name)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(_solve, points))
    return [_solve(pt) for pt in points]
