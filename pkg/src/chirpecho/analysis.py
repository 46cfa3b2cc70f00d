"""Histogram bookkeeping and decay-curve fits for echo data.

Three fit models cover the data treatments used on this memory:

  exp4   : eta(T_s) = eta_o * exp(-4*T_s/T2)          (efficiency vs storage)
  mims   : I(tau)   = I0 * exp(-2*(2*tau/T2)^chi)     (two-pulse echo decay)
  exp_t1 : C(t)     = C0 * exp(-t/T1) [+ background]  (spontaneous decay)

All fits run a damped Gauss-Newton loop with analytic Jacobians and a fixed
deterministic iteration policy, so identical inputs give bit-identical
parameters. Decay times are parameterized internally by rates, which keeps
flat data well defined (rate -> 0 reported as an unbounded decay time).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import FitError, ParameterError

UNBOUNDED_RATE = 1e-9  # 1/s; fitted rates below this report T as unbounded


# ---------------------------------------------------------------------------
# histograms

@dataclass(frozen=True)
class CountHistogram:
    """Time-binned photon counts with named analysis windows.

    windows maps a name ('input', 'echo', 'noise', ...) to a half-open
    [start, end) interval in seconds. Bins belong to a window when their
    center falls inside it.
    """

    edges: np.ndarray
    counts: np.ndarray
    n_cycles: int = 1
    windows: dict = field(default_factory=dict)

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=float)
        counts = np.asarray(self.counts)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "counts", counts)
        if edges.ndim != 1 or len(edges) < 2 or not np.all(np.diff(edges) > 0):
            raise ParameterError("edges must be strictly increasing, length >= 2")
        if counts.shape != (len(edges) - 1,):
            raise ParameterError("counts length must equal number of bins")
        if np.any(counts < 0):
            raise ParameterError("counts must be nonnegative")
        if self.n_cycles < 1:
            raise ParameterError("n_cycles must be >= 1")
        for name, (a, b) in self.windows.items():
            if not (edges[0] <= a < b <= edges[-1]):
                raise ParameterError(f"window {name!r} outside the histogram range")

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    def window_mask(self, name: str) -> np.ndarray:
        if name not in self.windows:
            raise ParameterError(f"histogram has no window {name!r}")
        a, b = self.windows[name]
        c = self.centers
        return (c >= a) & (c < b)

    def window_counts(self, name: str) -> int:
        return int(self.counts[self.window_mask(name)].sum())

    def window_length(self, name: str) -> float:
        a, b = self.windows[name]
        return b - a


def bin_timestamps(timestamps, bin_width: float, t_start: float | None = None,
                   t_end: float | None = None, windows=None,
                   n_cycles: int = 1):
    """Fixed-width binning; returns (histogram, n_dropped outside the range)."""
    if bin_width <= 0.0:
        raise ParameterError("bin_width must be > 0")
    ts = np.asarray(list(timestamps), dtype=float)
    if t_start is None:
        t_start = 0.0 if ts.size == 0 else np.floor(ts.min() / bin_width) * bin_width
    if t_end is None:
        t_end = t_start + bin_width if ts.size == 0 else ts.max() + bin_width
    n_bins = max(1, int(np.ceil((t_end - t_start) / bin_width - 1e-9)))
    edges = t_start + bin_width * np.arange(n_bins + 1)
    inside = (ts >= edges[0]) & (ts < edges[-1])
    dropped = int(ts.size - inside.sum())
    idx = np.floor((ts[inside] - t_start) / bin_width).astype(int)
    counts = np.bincount(idx, minlength=n_bins)
    return CountHistogram(edges, counts, n_cycles, dict(windows or {})), dropped


@dataclass(frozen=True)
class EfficiencyResult:
    efficiency: float
    clamped: bool
    echo_counts: float
    noise_estimate: float
    reference_counts: float


def efficiency_from_histogram(h: CountHistogram, reference: CountHistogram,
                              calibration: float = 1.0) -> EfficiencyResult:
    """Background-subtracted echo counts over the reference input counts.

    Both histograms are normalized per cycle. The noise window's counts are
    scaled to the echo window length before subtraction. ``calibration``
    optionally divides out detection-path efficiencies (default none).
    """
    ref = reference.window_counts("input") / reference.n_cycles
    if ref <= 0.0:
        raise ParameterError("reference input window has zero counts")
    echo = h.window_counts("echo") / h.n_cycles
    noise = 0.0
    if "noise" in h.windows and h.window_length("noise") > 0.0:
        noise = (h.window_counts("noise") / h.n_cycles
                 * h.window_length("echo") / h.window_length("noise"))
    eta = (echo - noise) / ref / calibration
    clamped = not 0.0 <= eta <= 1.0
    return EfficiencyResult(min(max(eta, 0.0), 1.0), clamped, echo, noise, ref)


@dataclass(frozen=True)
class SnrResult:
    snr: float
    infinite: bool
    signal_per_cycle: float
    noise_per_cycle: float


def snr(h: CountHistogram, noise_run: CountHistogram,
        window: str = "echo") -> SnrResult:
    """Per-cycle counts in the window of ``h`` over the same window of a run
    recorded without the input."""
    if h.windows.get(window) != noise_run.windows.get(window):
        raise ParameterError("signal and noise runs must share the window")
    sig = h.window_counts(window) / h.n_cycles
    noi = noise_run.window_counts(window) / noise_run.n_cycles
    if noi == 0.0:
        return SnrResult(float("inf"), True, sig, noi)
    return SnrResult(sig / noi, False, sig, noi)


# ---------------------------------------------------------------------------
# decay fits

@dataclass(frozen=True)
class DecayFit:
    model: str
    params: dict
    sigmas: dict
    residual_norm: float
    cov_condition: float
    n_iterations: int
    unbounded: tuple = ()

    def __getitem__(self, name: str) -> float:
        return self.params[name]


def _gauss_newton(residual, jacobian, p0, max_iter: int = 200,
                  tol: float = 1e-12):
    """Levenberg-damped Gauss-Newton with a fixed, deterministic policy."""
    p = np.asarray(p0, dtype=float)
    lam = 1e-3
    r = residual(p)
    cost = float(r @ r)
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        J = jacobian(p)
        g = J.T @ r
        H = J.T @ J
        # Marquardt scaling keeps the step invariant under ordinate rescaling
        scale = np.diag(H).copy()
        scale[scale <= 0.0] = 1.0
        improved = False
        for _ in range(25):
            try:
                step = np.linalg.solve(H + lam * np.diag(scale), -g)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            p_new = p + step
            r_new = residual(p_new)
            cost_new = float(r_new @ r_new)
            if np.isfinite(cost_new) and cost_new <= cost:
                rel = (cost - cost_new) / max(cost, 1e-300)
                p, r, cost = p_new, r_new, cost_new
                lam = max(lam * 0.3, 1e-12)
                improved = True
                break
            lam *= 10.0
        if not improved:
            break
        if rel < tol:
            break
    else:
        raise FitError(f"no convergence after {max_iter} iterations "
                       f"(last cost {cost:.3e})")
    J = jacobian(p)
    H = J.T @ J
    dof = max(len(r) - len(p), 1)
    s2 = cost / dof
    try:
        cov = np.linalg.inv(H) * s2
        sig = np.sqrt(np.clip(np.diag(cov), 0.0, None))
        cond = float(np.linalg.cond(H))
    except np.linalg.LinAlgError:
        sig = np.full(len(p), np.inf)
        cond = float("inf")
    return p, sig, float(np.sqrt(cost)), cond, n_iter


def _prepare(points, min_points: int, model: str):
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ParameterError(f"{model}: points must be (x, y) pairs")
    if len(pts) < min_points:
        raise ParameterError(f"{model}: needs at least {min_points} points")
    x, y = pts[:, 0], pts[:, 1]
    if np.any(~np.isfinite(x)) or np.any(~np.isfinite(y)):
        raise ParameterError(f"{model}: non-finite input")
    return x, y


def _poisson_weights(y):
    """1/sigma weights for count data, sigma = sqrt(max(count, 1)).

    Below ~25 counts this is the Poisson floor rather than a Gaussian
    estimate; above it the two coincide.
    """
    return 1.0 / np.sqrt(np.clip(y, 1.0, None))


def _log_slope_rate(x, y, factor: float) -> float:
    """Initial decay rate from the first/last point log slope (>= 0)."""
    i, j = 0, len(x) - 1
    if y[i] <= 0.0 or y[j] <= 0.0 or x[j] == x[i]:
        return 0.0
    k = -np.log(y[j] / y[i]) / (factor * (x[j] - x[i]))
    return max(k, 0.0)


def fit_efficiency_decay(points) -> DecayFit:
    """Fit eta(T_s) = eta_o * exp(-4*T_s/T2); points are (T_s, eta) pairs."""
    x, y = _prepare(points, 3, "exp4")
    if np.any(x < 0.0):
        raise ParameterError("exp4: storage times must be >= 0")
    if np.all(y == 0.0):
        raise FitError("exp4: all efficiencies are zero (degenerate)")
    k0 = _log_slope_rate(x, y, 4.0)
    p0 = np.array([y[0] * np.exp(4.0 * k0 * x[0]), k0])

    def model(p):
        return p[0] * np.exp(-4.0 * p[1] * x)

    def residual(p):
        return model(p) - y

    def jacobian(p):
        e = np.exp(-4.0 * p[1] * x)
        return np.stack([e, -4.0 * x * p[0] * e], axis=1)

    p, sig, rn, cond, it = _gauss_newton(residual, jacobian, p0)
    unbounded = ()
    if p[1] < UNBOUNDED_RATE:
        t2, t2_sig = float("inf"), float("inf")
        unbounded = ("t2",)
    else:
        t2, t2_sig = 1.0 / p[1], sig[1] / p[1] ** 2
    return DecayFit("exp4", {"eta_o": p[0], "t2": t2},
                    {"eta_o": sig[0], "t2": t2_sig}, rn, cond, it, unbounded)


def fit_mims(points) -> DecayFit:
    """Fit I(tau12) = I0 * exp(-2*(2*tau12/T2)^chi); points are (tau12, I)."""
    x, y = _prepare(points, 4, "mims")
    if np.any(x <= 0.0):
        raise ParameterError("mims: delays must be > 0")
    if np.all(y <= 0.0):
        raise FitError("mims: nonpositive intensities (degenerate)")
    k0 = _log_slope_rate(x, y, 4.0)  # chi=1 start: exponent -4*k*tau
    p0 = np.array([y[0] * np.exp(4.0 * k0 * x[0]), max(k0, 1.0 / (4.0 * x[-1])), 1.0])

    def parts(p):
        u = 2.0 * p[1] * x          # 2*tau/T2; u <= 0 yields a rejected step
        with np.errstate(invalid="ignore"):
            up = u ** p[2]
        return u, up, p[0] * np.exp(-2.0 * up)

    def residual(p):
        return parts(p)[2] - y

    def jacobian(p):
        u, up, f = parts(p)
        return np.stack([f / p[0],
                         f * (-2.0 * p[2] * up / p[1]),
                         f * (-2.0 * up * np.log(u))], axis=1)

    p, sig, rn, cond, it = _gauss_newton(residual, jacobian, p0)
    unbounded = ()
    if p[1] < UNBOUNDED_RATE:
        t2, t2_sig = float("inf"), float("inf")
        unbounded = ("t2",)
    else:
        t2, t2_sig = 1.0 / p[1], sig[1] / p[1] ** 2
    if p[2] <= 0.0:
        raise FitError(f"mims: fitted chi={p[2]:.3g} is not positive")
    return DecayFit("mims", {"i0": p[0], "t2": t2, "chi": p[2]},
                    {"i0": sig[0], "t2": t2_sig, "chi": sig[2]},
                    rn, cond, it, unbounded)


def fit_t1(points, background: bool = False) -> DecayFit:
    """Fit C(t) = C0 * exp(-t/T1) (+ constant background if requested)."""
    x, y = _prepare(points, 3, "exp_t1")
    w = _poisson_weights(y)
    k0 = _log_slope_rate(x, y, 1.0)
    if background:
        p0 = np.array([max(y[0] - y[-1], 1e-12), k0, y[-1]])
    else:
        p0 = np.array([y[0] * np.exp(k0 * x[0]), k0])

    def model(p):
        m = p[0] * np.exp(-p[1] * x)
        return m + p[2] if background else m

    def residual(p):
        return (model(p) - y) * w

    def jacobian(p):
        e = np.exp(-p[1] * x)
        cols = [e * w, -x * p[0] * e * w]
        if background:
            cols.append(np.ones_like(x) * w)
        return np.stack(cols, axis=1)

    p, sig, rn, cond, it = _gauss_newton(residual, jacobian, p0)
    unbounded = ()
    if p[1] < UNBOUNDED_RATE:
        t1, t1_sig = float("inf"), float("inf")
        unbounded = ("t1",)
    else:
        t1, t1_sig = 1.0 / p[1], sig[1] / p[1] ** 2
    params = {"c0": p[0], "t1": t1}
    sigmas = {"c0": sig[0], "t1": t1_sig}
    if background:
        params["background"] = p[2]
        sigmas["background"] = sig[2]
    return DecayFit("exp_t1", params, sigmas, rn, cond, it, unbounded)


FIT_MODELS = {
    "exp4": fit_efficiency_decay,
    "mims": fit_mims,
    "exp_t1": fit_t1,
}


def evaluate_model(fit: DecayFit, x):
    """Model curve for a finished fit (used for overlay exports)."""
    x = np.asarray(x, dtype=float)
    p = fit.params
    if fit.model == "exp4":
        rate = 0.0 if "t2" in fit.unbounded else 4.0 / p["t2"]
        return p["eta_o"] * np.exp(-rate * x)
    if fit.model == "mims":
        if "t2" in fit.unbounded:
            return np.full_like(x, p["i0"])
        return p["i0"] * np.exp(-2.0 * (2.0 * x / p["t2"]) ** p["chi"])
    if fit.model == "exp_t1":
        rate = 0.0 if "t1" in fit.unbounded else 1.0 / p["t1"]
        return p["c0"] * np.exp(-rate * x) + p.get("background", 0.0)
    raise ParameterError(f"unknown model {fit.model!r}")
