"""Pulse-level simulation of the chirped-pulse phase-encoding memory.

A schedule of weak inputs and chirped control-pulse (CP) pairs is played
against one or more spectral memory cells, each an inhomogeneously broadened
slab of two-level atoms. The first CP of a pair adiabatically inverts its
cell and scrambles the rephasing with a detuning-dependent phase; an
identical second CP undoes the scrambling so the stored input re-emits at

    T_s = 2 * (tau2 + tau_cp)

after its arrival, where tau2 separates the end of CP1 from the start of
CP2 (edge convention). All delays quoted below use that convention.

The emission observable is the macroscopic coherence
S(t) = exp(-t/T2) * sum_j w_j * c_e,j * conj(c_g,j); there is no propagation
or optical-depth modelling, so window energies are meaningful as ratios and
timings, not as absolute efficiencies.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .bloch import (ChirpPulse, TWO_PI, default_peak_rabi, free_evolution,
                    max_step, propagate)
from .errors import ParameterError, ScheduleError
from .repeater import MemoryModel

DEFAULT_CELL_SPACING_HZ = 4.0e6


# ---------------------------------------------------------------------------
# cells and atoms

@dataclass(frozen=True)
class MemoryCellSpec:
    """One spectral memory cell.

    center_hz      : cell center relative to the rotating frame
    width_hz       : simulated spectral window
    n_atoms        : stratified sample size (grid points)
    profile        : 'uniform' or 'lorentzian' (truncated to the window)
    profile_fwhm_hz: Lorentzian FWHM for the 'lorentzian' profile
    density_per_hz : represented ion density; per-atom weight is
                     density * width / n_atoms
    """

    center_hz: float = 0.0
    width_hz: float = 3.0e6
    n_atoms: int = 2001
    profile: str = "uniform"
    profile_fwhm_hz: float | None = None
    density_per_hz: float = 1.0e-6

    def __post_init__(self):
        if self.width_hz <= 0.0:
            raise ParameterError("width_hz must be > 0")
        if self.n_atoms < 1:
            raise ParameterError("n_atoms must be >= 1")
        if self.profile not in ("uniform", "lorentzian"):
            raise ParameterError(f"unknown profile {self.profile!r}")
        if self.profile == "lorentzian" and not self.profile_fwhm_hz:
            raise ParameterError("lorentzian profile needs profile_fwhm_hz")

    def detunings(self) -> np.ndarray:
        """Deterministic stratified detunings (absolute Hz, midpoint rule)."""
        q = (np.arange(self.n_atoms) + 0.5) / self.n_atoms
        if self.profile == "uniform":
            rel = (q - 0.5) * self.width_hz
        else:
            # inverse CDF of a Lorentzian truncated to +-width/2
            gamma = self.profile_fwhm_hz / 2.0
            edge = np.arctan(self.width_hz / (2.0 * gamma))
            rel = gamma * np.tan((2.0 * q - 1.0) * edge)
        return self.center_hz + rel

    def weights(self) -> np.ndarray:
        total = self.density_per_hz * self.width_hz
        return np.full(self.n_atoms, total / self.n_atoms)


def check_cells(cells, min_spacing_hz: float = DEFAULT_CELL_SPACING_HZ):
    """Cells must not overlap; adjacent centers at least min_spacing apart."""
    cells = list(cells)
    order = sorted(range(len(cells)), key=lambda i: cells[i].center_hz)
    for a, b in zip(order, order[1:]):
        ca, cb = cells[a], cells[b]
        if cb.center_hz - ca.center_hz < min_spacing_hz:
            warnings.warn(f"cells {a} and {b} closer than {min_spacing_hz} Hz")
        if ca.center_hz + ca.width_hz / 2 > cb.center_hz - cb.width_hz / 2:
            raise ParameterError(f"cells {a} and {b} overlap spectrally")
    return cells


class AtomEnsemble:
    """Mutable two-level ensemble state over all cells.

    Amplitude pairs stay unit norm; decoherence lives in observable-side
    factors: the coherence weight exp(-t/T2) (applied when sampling) and a
    per-atom excited-population weight accumulated during free segments.
    """

    def __init__(self, cells):
        cells = list(cells)
        self.detuning_hz = np.concatenate([c.detunings() for c in cells])
        self.weight = np.concatenate([c.weights() for c in cells])
        self.cell_index = np.concatenate(
            [np.full(c.n_atoms, i, dtype=int) for i, c in enumerate(cells)])
        n = len(self.detuning_hz)
        self.c_g = np.ones(n, dtype=complex)
        self.c_e = np.zeros(n, dtype=complex)
        self.pop_decay = np.ones(n)
        self.n_cells = len(cells)

    @property
    def norm_error(self) -> float:
        return float(np.max(np.abs(np.abs(self.c_g) ** 2 + np.abs(self.c_e) ** 2 - 1.0)))

    def populations(self) -> np.ndarray:
        """Excited-state populations including the T1 decay weight."""
        return np.abs(self.c_e) ** 2 * self.pop_decay

    def coherence_rows(self) -> np.ndarray:
        """(n_cells, n_atoms) weight matrix selecting each cell's atoms."""
        rows = np.zeros((self.n_cells, len(self.weight)))
        for i in range(self.n_cells):
            m = self.cell_index == i
            rows[i, m] = self.weight[m]
        return rows


# ---------------------------------------------------------------------------
# inputs and imprinting

SPECTRAL_WEIGHTS = {
    # unit-peak |FT| of the amplitude envelope, vs offset from the carrier
    "lorentzian": lambda nu, fwhm: np.exp(-np.pi * fwhm * np.abs(nu)),
    "gaussian": lambda nu, fwhm: np.exp(-(np.pi * nu * fwhm) ** 2 / (4.0 * np.log(2.0))),
}


@dataclass(frozen=True)
class InputPulse:
    """Weak probe pulse, imprinted in the impulse approximation at t_center.

    amplitude is the peak coherence rotation angle (radians, half the pulse
    area at line center); keep it well below 0.3 for linear-memory behaviour.
    """

    t_center: float
    amplitude: float = 0.05
    fwhm: float = 0.75e-6
    offset_hz: float = 0.0
    shape: str = "lorentzian"

    def __post_init__(self):
        if self.amplitude < 0.0:
            raise ParameterError("amplitude must be >= 0")
        if self.fwhm <= 0.0:
            raise ParameterError("fwhm must be > 0")
        if self.shape not in SPECTRAL_WEIGHTS:
            raise ParameterError(f"unknown input shape {self.shape!r}")

    def spectral_weight(self, detuning_hz):
        return SPECTRAL_WEIGHTS[self.shape](
            np.asarray(detuning_hz) - self.offset_hz, self.fwhm)


def imprint_input(ensemble: AtomEnsemble, pulse: InputPulse):
    """First-order imprint as an exact small-angle rotation (norm preserving)."""
    if pulse.amplitude >= 0.3:
        warnings.warn(f"input amplitude {pulse.amplitude} is outside the "
                      "linear regime; imprint uses the exact rotation")
    a = pulse.amplitude * pulse.spectral_weight(ensemble.detuning_hz)
    cos_a, sin_a = np.cos(a), np.sin(a)
    g, e = ensemble.c_g, ensemble.c_e
    ensemble.c_g = cos_a * g - 1j * sin_a * e
    ensemble.c_e = -1j * sin_a * g + cos_a * e
    return ensemble


# ---------------------------------------------------------------------------
# schedules

@dataclass(frozen=True)
class CpPair:
    """A storage/recall CP pair addressed to one cell.

    tau1 : delay from the schedule origin (first input) to the start of CP1
    tau2 : delay from the end of CP1 to the start of CP2 (edge convention)
    """

    tau1: float
    tau2: float
    tau_cp: float = 30.0e-6
    delta_hz: float = 1.5e6
    a0: float | None = None
    omega0_hz: float = 0.0     # sweep-center offset from the cell center
    cell: int = 0
    apply_first: bool = True
    apply_second: bool = True

    def __post_init__(self):
        if self.tau1 < 0.0 or self.tau2 <= 0.0 or self.tau_cp <= 0.0:
            raise ParameterError("tau1 >= 0, tau2 > 0 and tau_cp > 0 required")

    @property
    def storage_time(self) -> float:
        return 2.0 * (self.tau2 + self.tau_cp)

    def peak_rabi(self) -> float:
        if self.a0 is not None:
            return self.a0
        return default_peak_rabi(self.delta_hz, self.tau_cp)

    def realize(self, cells, offsets_hz=(0.0, 0.0)):
        """Concrete ChirpPulse list for this pair against the given cells."""
        center = cells[self.cell].center_hz + self.omega0_hz
        a0 = self.peak_rabi()
        out = []
        if self.apply_first:
            out.append(ChirpPulse(a0, self.tau_cp, self.delta_hz,
                                  center + offsets_hz[0], self.tau1))
        if self.apply_second:
            t2_start = self.tau1 + self.tau_cp + self.tau2
            out.append(ChirpPulse(a0, self.tau_cp, self.delta_hz,
                                  center + offsets_hz[1], t2_start))
        return out


@dataclass(frozen=True)
class PulseSchedule:
    inputs: tuple
    cp_pairs: tuple

    def __post_init__(self):
        if not self.cp_pairs:
            raise ScheduleError("schedule needs at least one CP pair")

    def validate(self, cells):
        """Raise on structural problems; warn on the 2*tau1 < tau2 rule."""
        for i, pair in enumerate(self.cp_pairs):
            if 2.0 * pair.tau1 >= pair.tau2:
                warnings.warn(
                    f"cp_pairs[{i}]: 2*tau1 >= tau2; the unsilenced echo may "
                    "overlap the recalled output (keep 2*tau1 < tau2)")
        # per-cell CP overlap check
        by_cell: dict[int, list] = {}
        for i, pair in enumerate(self.cp_pairs):
            for p in pair.realize(cells):
                by_cell.setdefault(pair.cell, []).append((p.t_start, p.t_end, i))
        for cell, spans in by_cell.items():
            spans.sort()
            for (s0, e0, i0), (s1, e1, i1) in zip(spans, spans[1:]):
                if s1 < e0:
                    raise ScheduleError(
                        f"CP windows of pairs {i0} and {i1} overlap in cell {cell}")
        # imprints must not fall inside any pulse window
        all_spans = [(p.t_start, p.t_end) for pair in self.cp_pairs
                     for p in pair.realize(cells)]
        for k, inp in enumerate(self.inputs):
            for s, e in all_spans:
                if s <= inp.t_center <= e:
                    raise ScheduleError(
                        f"inputs[{k}] at {inp.t_center} lies inside a CP window")


# ---------------------------------------------------------------------------
# trace containers

@dataclass(frozen=True)
class Window:
    kind: str        # input | echo | primary | unsilenced | cp_echo
    center: float
    start: float
    end: float
    input_index: int | None = None
    pair_index: int | None = None
    cell: int | None = None

    @property
    def label(self) -> str:
        bits = [self.kind]
        if self.input_index is not None:
            bits.append(f"in{self.input_index}")
        if self.pair_index is not None:
            bits.append(f"cp{self.pair_index}")
        return "_".join(bits)


@dataclass
class EmissionTrace:
    times: np.ndarray
    coherence: np.ndarray            # damped macroscopic S(t)
    per_cell: np.ndarray             # (n_cells, n_times) damped per-cell sums
    windows: tuple = ()
    metadata: dict = field(default_factory=dict)

    @property
    def intensity(self) -> np.ndarray:
        return np.abs(self.coherence) ** 2

    def window_energy(self, window: Window, cell: int | None = None) -> float:
        m = (self.times >= window.start) & (self.times <= window.end)
        if not np.any(m):
            return 0.0
        s = self.coherence[m] if cell is None else self.per_cell[cell][m]
        dt = self.times[1] - self.times[0]
        return float(np.sum(np.abs(s) ** 2) * dt)

    def select(self, kind: str, input_index=None, pair_index=None):
        out = [w for w in self.windows if w.kind == kind
               and (input_index is None or w.input_index == input_index)
               and (pair_index is None or w.pair_index == pair_index)]
        return out


@dataclass
class SequenceResult:
    trace: EmissionTrace
    final_populations: np.ndarray
    detuning_hz: np.ndarray
    weight: np.ndarray
    cell_index: np.ndarray
    norm_error: float
    metadata: dict


# ---------------------------------------------------------------------------
# the sequence engine

def _annotate(schedule: PulseSchedule, cells, half: float):
    wins = []
    pair_pulses = [pair.realize(cells) for pair in schedule.cp_pairs]
    for k, inp in enumerate(schedule.inputs):
        wins.append(Window("input", inp.t_center, inp.t_center - half,
                           inp.t_center + half, input_index=k))
    for j, (pair, pulses) in enumerate(zip(schedule.cp_pairs, pair_pulses)):
        if not (pair.apply_first and pair.apply_second):
            cp1 = pulses[0] if pair.apply_first else None
            if cp1 is not None:
                for k, inp in enumerate(schedule.inputs):
                    if _input_cell(inp, cells) != pair.cell:
                        continue
                    tau1_k = cp1.t_start - inp.t_center
                    c = cp1.t_end + 2.0 * tau1_k
                    wins.append(Window("primary", c, c - half, c + half, k, j, pair.cell))
                    c2 = 2.0 * cp1.t_center - inp.t_center
                    wins.append(Window("unsilenced", c2, c2 - half, c2 + half,
                                       k, j, pair.cell))
            continue
        cp1, cp2 = pulses
        for k, inp in enumerate(schedule.inputs):
            if _input_cell(inp, cells) != pair.cell:
                continue
            c = inp.t_center + 2.0 * (cp2.t_center - cp1.t_center)
            wins.append(Window("echo", c, c - half, c + half, k, j, pair.cell))
            tau1_k = cp1.t_start - inp.t_center
            c = cp1.t_end + 2.0 * tau1_k
            wins.append(Window("primary", c, c - half, c + half, k, j, pair.cell))
            c = 2.0 * cp1.t_center - inp.t_center
            wins.append(Window("unsilenced", c, c - half, c + half, k, j, pair.cell))
        c = 2.0 * cp2.t_center - cp1.t_center
        wins.append(Window("cp_echo", c, c - half, c + half, None, j, pair.cell))
    return wins


def _input_cell(inp: InputPulse, cells) -> int:
    centers = np.array([c.center_hz for c in cells])
    return int(np.argmin(np.abs(centers - inp.offset_hz)))


def run_sequence(schedule: PulseSchedule, cells, mem: MemoryModel,
                 jitter_offsets_hz=None, dt: float | None = None,
                 dt_out: float = 0.05e-6, t_end: float | None = None,
                 window_half: float | None = None) -> SequenceResult:
    """Play the schedule and return the emission trace plus final populations.

    jitter_offsets_hz : optional per-CP frequency offsets (one entry per
        realized CP, pair by pair), modelling slow laser frequency wander;
        a common offset on every pulse leaves the echo timing unchanged, the
        pulse-to-pulse differences shift it.
    """
    cells = check_cells(cells)
    schedule.validate(cells)

    # realize pulses, with optional per-pulse frequency offsets
    realized = []
    pair_of = []
    cursor = 0
    for j, pair in enumerate(schedule.cp_pairs):
        n_here = int(pair.apply_first) + int(pair.apply_second)
        offs = (0.0, 0.0)
        if jitter_offsets_hz is not None:
            got = list(np.asarray(jitter_offsets_hz, dtype=float)[cursor:cursor + n_here])
            got += [0.0] * (2 - len(got))
            offs = (got[0], got[1]) if pair.apply_first else (0.0, got[0])
        cursor += n_here
        for p in pair.realize(cells, offs):
            realized.append(p)
            pair_of.append(j)
    order = np.argsort([p.t_start for p in realized])
    realized = [realized[i] for i in order]

    if window_half is None:
        window_half = 1.5 * max(inp.fwhm for inp in schedule.inputs) if schedule.inputs else 1.0e-6
    windows = _annotate(schedule, cells, window_half)

    if t_end is None:
        latest = max([w.end for w in windows] + [p.t_end for p in realized])
        t_end = latest + 10.0e-6
    times = np.arange(0.0, t_end, dt_out)

    for w in windows:
        if w.kind == "echo":
            for p in realized:
                if p.t_start < w.end and w.start < p.t_end:
                    warnings.warn(
                        f"echo window {w.label} overlaps a CP window; check the "
                        "2*tau1 < tau2 timing rule")

    ens = AtomEnsemble(cells)
    if dt is None:
        dt = max_step(realized, float(np.max(np.abs(ens.detuning_hz))))
    else:
        limit = max_step(realized, float(np.max(np.abs(ens.detuning_hz))))
        if dt > limit * (1.0 + 1e-9):
            raise ParameterError(f"dt={dt:.3e} exceeds the stability limit {limit:.3e}")

    rows = ens.coherence_rows()
    n_cells = rows.shape[0]
    per_cell = np.zeros((n_cells, len(times)), dtype=complex)

    # event tape: imprints (instantaneous) and pulse segments, time ordered
    events = [("imprint", inp.t_center, inp) for inp in schedule.inputs]
    events += [("pulse", p.t_start, p) for p in realized]
    events.sort(key=lambda e: e[1])

    # merge pulses whose supports overlap into joint integration segments
    segments = []   # (t0, t1, [pulses]) or (t0, t1, None) for free evolution
    merged = []
    for kind, t, payload in events:
        if kind != "pulse":
            continue
        if merged and payload.t_start < merged[-1][1]:
            merged[-1] = (merged[-1][0], max(merged[-1][1], payload.t_end),
                          merged[-1][2] + [payload])
        else:
            merged.append((payload.t_start, payload.t_end, [payload]))

    cell_masks = [ens.cell_index == i for i in range(n_cells)]
    sample_chunk = max(1, 4_000_000 // max(1, len(ens.detuning_hz)))

    def sample_free(t_now, t_next, t_ref):
        """Fill per_cell for output samples in [t_now, t_next) by free evolution."""
        m = (times >= t_now) & (times < t_next)
        idx = np.nonzero(m)[0]
        if idx.size == 0:
            return
        coh = ens.weight * ens.c_e * np.conj(ens.c_g)
        for s in range(0, idx.size, sample_chunk):
            sel = idx[s:s + sample_chunk]
            phase = np.exp(-1j * TWO_PI * np.outer(times[sel] - t_ref, ens.detuning_hz))
            vals = phase * coh
            for i in range(n_cells):
                per_cell[i, sel] = vals[:, cell_masks[i]].sum(axis=1)

    t_now = 0.0
    norm_err = 0.0
    imprints = [e for e in events if e[0] == "imprint"]
    ii = 0
    for seg_start, seg_end, pulses in merged + [(t_end, t_end, None)]:
        # free evolution (with imprints) up to the segment
        while ii < len(imprints) and imprints[ii][1] <= seg_start:
            t_imp = imprints[ii][1]
            sample_free(t_now, t_imp, t_now)
            if t_imp > t_now:
                ens.c_g, ens.c_e = free_evolution(ens.c_g, ens.c_e,
                                                  ens.detuning_hz, t_imp - t_now)
                ens.pop_decay *= np.exp(-(t_imp - t_now) / mem.t1)
            imprint_input(ens, imprints[ii][2])
            t_now = t_imp
            ii += 1
        sample_free(t_now, seg_start, t_now)
        if seg_start > t_now:
            ens.c_g, ens.c_e = free_evolution(ens.c_g, ens.c_e,
                                              ens.detuning_hz, seg_start - t_now)
            ens.pop_decay *= np.exp(-(seg_start - t_now) / mem.t1)
            t_now = seg_start
        if pulses is None:
            break
        m = (times >= seg_start) & (times < seg_end)
        ens.c_g, ens.c_e, smp = propagate(
            ens.c_g, ens.c_e, ens.detuning_hz, pulses, seg_start, seg_end, dt,
            sample_times=times[m], sample_weights=rows)
        if smp.size:
            per_cell[:, m] = smp.T
        norm_err = max(norm_err, ens.norm_error)
        t_now = seg_end

    damp = np.exp(-times / mem.t2)
    per_cell *= damp
    total = per_cell.sum(axis=0)

    meta = {
        "dt_integration_s": dt,
        "dt_output_s": dt_out,
        "window_half_s": window_half,
        "pulses": [
            {"pair": pair_of[int(i)], "t_start_s": p.t_start, "tau_cp_s": p.tau_cp,
             "delta_hz": p.delta, "omega0_hz": p.omega0, "a0_rad_s": p.a0,
             "adiabaticity_q": p.adiabaticity}
            for i, p in zip(order, realized)],
        "norm_error": norm_err,
    }
    trace = EmissionTrace(times, total, per_cell, tuple(windows), meta)
    return SequenceResult(trace, ens.populations(), ens.detuning_hz.copy(),
                          ens.weight.copy(), ens.cell_index.copy(), norm_err, meta)


def run_input_linked(schedule: PulseSchedule, cells, mem: MemoryModel,
                     **run_kwargs) -> SequenceResult:
    """Run the schedule and subtract the field of the same run without inputs.

    The CPs emit their own transients (swept free induction, CP echoes); the
    detection in the source experiments separates the stored signal from that
    background with reference runs recorded without the input. The subtracted
    complex field isolates the input-linked emission exactly in the weak
    (linear) regime. Windows, populations and metadata come from the
    with-input run.
    """
    res = run_sequence(schedule, cells, mem, **run_kwargs)
    times = res.trace.times
    blank_kwargs = dict(run_kwargs)
    blank_kwargs["t_end"] = float(times[-1]) + float(times[1] - times[0]) / 2.0
    blank_kwargs.setdefault("dt_out", times[1] - times[0])
    blank = run_sequence(PulseSchedule((), schedule.cp_pairs), cells, mem,
                         **blank_kwargs)
    per_cell = res.trace.per_cell - blank.trace.per_cell
    trace = EmissionTrace(times, per_cell.sum(axis=0), per_cell,
                          res.trace.windows, res.trace.metadata)
    return SequenceResult(trace, res.final_populations, res.detuning_hz,
                          res.weight, res.cell_index, res.norm_error,
                          res.metadata)


# ---------------------------------------------------------------------------
# metrics

@dataclass(frozen=True)
class EchoMetrics:
    window: Window
    peak_time: float
    energy: float
    efficiency_proxy: float
    fwhm: float
    absent: bool


def _peak_interp(t, y, i):
    """Quadratic peak interpolation around sample i."""
    if 0 < i < len(y) - 1:
        d = y[i - 1] - 2.0 * y[i] + y[i + 1]
        if d < 0.0:
            return t[i] + 0.5 * (y[i - 1] - y[i + 1]) / d * (t[1] - t[0])
    return t[i]


def _fwhm(t, y, i):
    half = y[i] / 2.0
    lo = i
    while lo > 0 and y[lo] > half:
        lo -= 1
    hi = i
    while hi < len(y) - 1 and y[hi] > half:
        hi += 1
    if lo == i or hi == i:
        return 0.0

    def cross(a, b):
        if y[b] == y[a]:
            return t[a]
        return t[a] + (half - y[a]) / (y[b] - y[a]) * (t[b] - t[a])

    return cross(hi - 1, hi) - cross(lo + 1, lo)


def input_reference_energy(trace: EmissionTrace) -> float:
    """Summed window energy of the free-induction bursts at the inputs."""
    return sum(trace.window_energy(w) for w in trace.select("input"))


def echo_metrics(trace: EmissionTrace, reference_energy: float,
                 kind: str = "echo", cell: int | None = None,
                 noise_floor: float | None = None):
    """Per-window peak/energy/efficiency-proxy/FWHM for windows of ``kind``."""
    wins = trace.select(kind)
    if not wins:
        raise ParameterError(f"trace has no {kind!r} windows")
    inten = (np.abs(trace.per_cell[cell]) ** 2 if cell is not None
             else trace.intensity)
    if noise_floor is None:
        outside = np.ones(len(trace.times), dtype=bool)
        for w in trace.windows:
            outside &= ~((trace.times >= w.start) & (trace.times <= w.end))
        noise_floor = 10.0 * float(np.median(inten[outside])) if outside.any() else 0.0
    out = []
    for w in wins:
        m = (trace.times >= w.start) & (trace.times <= w.end)
        if not np.any(m):
            out.append(EchoMetrics(w, w.center, 0.0, 0.0, 0.0, True))
            continue
        tt, yy = trace.times[m], inten[m]
        i = int(np.argmax(yy))
        energy = trace.window_energy(w, cell)
        absent = yy[i] <= noise_floor
        proxy = energy / reference_energy if reference_energy > 0.0 else 0.0
        out.append(EchoMetrics(w, _peak_interp(tt, yy, i), energy, proxy,
                               _fwhm(tt, yy, i), absent))
    return out


def noise_model(populations, weights, mem: MemoryModel, window,
                t_ref: float = 0.0) -> float:
    """Expected spontaneous-emission counts in ``window = (t0, t1)``.

    Residual excited population (taken at time t_ref, normally the end of the
    last CP) decays with T1; the expected counts are the emitted fraction in
    the window scaled by the detection noise_scale.
    """
    t0, t1 = window
    if t1 < t0:
        raise ParameterError("window end before start")
    excited = float(np.sum(np.asarray(weights) * np.asarray(populations)))
    frac = np.exp(-max(t0 - t_ref, 0.0) / mem.t1) - np.exp(-max(t1 - t_ref, 0.0) / mem.t1)
    return mem.noise_scale * excited * frac


def snr_estimate(echo_energy: float, noise_counts: float,
                 calibration: float = 1.0) -> float:
    """Echo counts over noise counts given a detection-calibration factor."""
    if noise_counts <= 0.0:
        return float("inf")
    return calibration * echo_energy / noise_counts


# ---------------------------------------------------------------------------
# presets and schedule builders

@dataclass(frozen=True)
class BandwidthPreset:
    """Input width / CP duration / chirp span presets for three bandwidths."""
    input_fwhm: float
    tau_cp: float
    delta_hz: float


BANDWIDTH_PRESETS = (
    BandwidthPreset(750e-9, 30e-6, 1.5e6),
    BandwidthPreset(500e-9, 40e-6, 2.2e6),
    BandwidthPreset(250e-9, 60e-6, 4.5e6),
)


def default_cell(preset: BandwidthPreset, center_hz: float = 0.0,
                 n_atoms: int = 2001) -> MemoryCellSpec:
    """Cell window covering the full chirp span (2*delta)."""
    return MemoryCellSpec(center_hz, 2.0 * preset.delta_hz, n_atoms)


def single_mode_schedule(preset: BandwidthPreset = BANDWIDTH_PRESETS[0],
                         tau1: float = 10e-6, tau2: float = 120e-6,
                         amplitude: float = 0.05, n_atoms: int = 2001,
                         a0: float | None = None, cp2: bool = True):
    """One input stored and recalled at T_s = 2*(tau2 + tau_cp)."""
    cells = [default_cell(preset, 0.0, n_atoms)]
    sched = PulseSchedule(
        (InputPulse(0.0, amplitude, preset.input_fwhm),),
        (CpPair(tau1, tau2, preset.tau_cp, preset.delta_hz, a0=a0,
                apply_second=cp2),))
    return sched, cells


def temporal_train_schedule(n_modes: int = 25, spacing: float = 7e-6,
                            storage_time: float = 800e-6,
                            preset: BandwidthPreset = BANDWIDTH_PRESETS[0],
                            amplitude: float = 0.05, n_atoms: int = 2001,
                            gap: float = 7e-6):
    """Train of temporal modes, all stored for ``storage_time``."""
    tau2 = storage_time / 2.0 - preset.tau_cp
    if tau2 <= 0.0:
        raise ParameterError("storage_time too short for this tau_cp")
    tau1 = (n_modes - 1) * spacing + gap
    inputs = tuple(InputPulse(k * spacing, amplitude, preset.input_fwhm)
                   for k in range(n_modes))
    cells = [default_cell(preset, 0.0, n_atoms)]
    sched = PulseSchedule(inputs, (CpPair(tau1, tau2, preset.tau_cp,
                                          preset.delta_hz),))
    return sched, cells


def spectral_multimode_schedule(n_temporal: int = 20, n_cells: int = 3,
                                cell_spacing_hz: float = DEFAULT_CELL_SPACING_HZ,
                                storage_time: float = 800e-6, recall_cell: int = 1,
                                preset: BandwidthPreset = BANDWIDTH_PRESETS[0],
                                spacing: float = 7e-6, amplitude: float = 0.05,
                                n_atoms: int = 2001, gap: float = 7e-6):
    """Fig-style spectro-temporal train with selective recall of one cell.

    Every cell is stored by its own CP1 (applied back to back after the
    train); only ``recall_cell`` receives a CP2, timed so its storage time is
    ``storage_time``.
    """
    if not 0 <= recall_cell < n_cells:
        raise ParameterError("recall_cell out of range")
    cells = [default_cell(preset, i * cell_spacing_hz, n_atoms)
             for i in range(n_cells)]
    inputs = tuple(
        InputPulse(k * spacing, amplitude, preset.input_fwhm,
                   offset_hz=(k % n_cells) * cell_spacing_hz)
        for k in range(n_temporal))
    t_first_cp = (n_temporal - 1) * spacing + gap
    pairs = []
    for i in range(n_cells):
        tau1_i = t_first_cp + i * (preset.tau_cp + 1e-6)
        if i == recall_cell:
            tau2_i = storage_time / 2.0 - preset.tau_cp
            if tau2_i <= 0.0:
                raise ParameterError("storage_time too short")
            pairs.append(CpPair(tau1_i, tau2_i, preset.tau_cp, preset.delta_hz,
                                cell=i))
        else:
            pairs.append(CpPair(tau1_i, storage_time, preset.tau_cp,
                                preset.delta_hz, cell=i, apply_second=False))
    return PulseSchedule(inputs, tuple(pairs)), cells


def sequential_recall_schedule(recall_times=(450e-6, 850e-6), n_inputs: int = 10,
                               spacing: float = 7e-6,
                               cell_spacing_hz: float = DEFAULT_CELL_SPACING_HZ,
                               preset: BandwidthPreset = BANDWIDTH_PRESETS[0],
                               amplitude: float = 0.05, n_atoms: int = 2001,
                               gap: float = 7e-6):
    """Two cells stored by simultaneous CP1s, recalled one after the other."""
    n_cells = len(recall_times)
    cells = [default_cell(preset, i * cell_spacing_hz, n_atoms)
             for i in range(n_cells)]
    inputs = []
    for k in range(n_inputs):
        for i in range(n_cells):
            inputs.append(InputPulse(k * spacing, amplitude, preset.input_fwhm,
                                     offset_hz=i * cell_spacing_hz))
    tau1 = (n_inputs - 1) * spacing + gap
    pairs = []
    for i, ts in enumerate(recall_times):
        tau2_i = ts / 2.0 - preset.tau_cp
        if tau2_i <= 0.0:
            raise ParameterError("recall time too short for this tau_cp")
        pairs.append(CpPair(tau1, tau2_i, preset.tau_cp, preset.delta_hz, cell=i))
    return PulseSchedule(tuple(inputs), tuple(pairs)), cells


def two_pulse_echo_schedule(tau12: float, cell_width_hz: float = 1.0e6,
                            pulse_duration: float = 0.3e-6,
                            fwhm: float = 0.75e-6, amplitude: float = 0.05,
                            n_atoms: int = 1001):
    """Weak input plus one unchirped pi pulse: plain two-pulse echo at 2*tau12.

    The pi pulse is a sech of area pi centered at tau12; with no chirp there
    is no phase scrambling and the echo is not silenced.
    """
    area_one = 2.0 * np.arctan(np.sinh(5.0)) / 10.0  # integral of sech envelope / tau
    a0 = np.pi / (area_one * pulse_duration)
    cells = [MemoryCellSpec(0.0, cell_width_hz, n_atoms)]
    pulse_pair = CpPair(tau12 - pulse_duration / 2.0, 10.0 * tau12,
                        pulse_duration, 0.0, a0=a0, apply_second=False)
    sched = PulseSchedule((InputPulse(0.0, amplitude, fwhm),), (pulse_pair,))
    return sched, cells


# ---------------------------------------------------------------------------
# laser-jitter averaging

@dataclass
class JitterResult:
    times: np.ndarray
    mean_intensity: np.ndarray
    echo_centers: np.ndarray
    single_fwhm: np.ndarray
    averaged_fwhm: float


def run_jitter_average(schedule: PulseSchedule, cells, mem: MemoryModel,
                       sigma_hz: float, n_cycles: int, seed: int,
                       **run_kwargs) -> JitterResult:
    """Average |S(t)|^2 over cycles with per-CP Gaussian frequency offsets.

    The per-cycle echo center moves with the offset difference between the
    two CPs of a pair, so the averaged echo is broader than any single one.
    """
    if n_cycles < 1:
        raise ParameterError("n_cycles must be >= 1")
    rng = np.random.Generator(np.random.PCG64(seed))
    n_pulses = sum(int(p.apply_first) + int(p.apply_second)
                   for p in schedule.cp_pairs)
    acc = None
    centers, widths = [], []
    times = None
    echo = None
    slack = 0.0
    for _ in range(n_cycles):
        offs = rng.normal(0.0, sigma_hz, n_pulses)
        res = run_sequence(schedule, cells, mem, jitter_offsets_hz=offs,
                           **run_kwargs)
        tr = res.trace
        if acc is None:
            acc = np.zeros_like(tr.intensity)
            times = tr.times
            echo = tr.select("echo")[0]
            # search wider than the window: the jitter can move the echo out
            pair = schedule.cp_pairs[echo.pair_index]
            rate = 2.0 * pair.delta_hz / pair.tau_cp
            slack = ((echo.end - echo.start) / 2.0
                     + 6.0 * np.sqrt(2.0) * sigma_hz / rate)
        acc += tr.intensity
        m = (times >= echo.center - slack) & (times <= echo.center + slack)
        tt, yy = times[m], tr.intensity[m]
        i = int(np.argmax(yy))
        centers.append(_peak_interp(tt, yy, i))
        widths.append(_fwhm(tt, yy, i))
    mean_int = acc / n_cycles
    m = (times >= echo.center - slack) & (times <= echo.center + slack)
    tt, yy = times[m], mean_int[m]
    i = int(np.argmax(yy))
    return JitterResult(times, mean_int, np.asarray(centers),
                        np.asarray(widths), _fwhm(tt, yy, i))
