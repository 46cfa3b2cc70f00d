"""Flat sectioned key-value config files for the command-line interface.

Format: ``[section]`` headers, ``key = value`` lines, ``#``/``;`` comments.
Sections and keys are fixed by the schema below; unknown names are errors
that carry the offending line number. Values are parsed per key as float,
int, bool, string, or a comma-separated float list.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ConfigError
from .repeater import DEFAULT_VELOCITY_KM_S

F, I, B, S, LIST = "float", "int", "bool", "str", "floatlist"

SCHEMA = {
    "source": {"rho": (F, 0.9), "nu": (F, 1.0)},
    "channel": {"alpha": (F, 0.21), "v": (F, DEFAULT_VELOCITY_KM_S)},
    "detectors": {"beta": (I, 2), "eta_d_i": (F, 0.9), "eta_d_s": (F, 0.9)},
    "memory": {"eta_o": (F, 0.65), "t2": (F, 3.0e-3), "t1": (F, 10.68e-3),
               "noise_scale": (F, 0.0)},
    "multiplexing": {"m_t": (I, 20), "m_s": (I, 3)},
    "sweep": {
        "l_min_km": (F, 10.0), "l_max_km": (F, 800.0), "l_step_km": (F, 10.0),
        "n_max": (I, 64),
        "m_s_values": (LIST, (3.0, 10.0, 100.0)),
        "heatmap_l_km": (F, 500.0),
        "t2_min_ms": (F, 0.2), "t2_max_ms": (F, 6.0), "t2_points": (I, 30),
        "eta_o_min": (F, 0.05), "eta_o_max": (F, 0.95), "eta_o_points": (I, 30),
        "nu_direct": (F, 1.0),
    },
    "mc": {"n_cycles": (I, 100000), "l_km": (F, 100.0), "n_links": (I, 2),
           "seed": (I, 1), "stream_outcomes": (I, 0),
           "channel_spacing_hz": (F, 4.0e6)},
    "pulse": {
        "mode": (S, "single"),  # single|train|spectral|sequential|custom
        "preset": (I, 1), "tau1_us": (F, 10.0), "tau2_us": (F, 120.0),
        "n_atoms": (I, 2001), "amplitude": (F, 0.05),
        "a0_rad_s": (F, 0.0),              # 0 -> adiabaticity default
        "n_modes": (I, 25), "mode_spacing_us": (F, 7.0),
        "storage_time_us": (F, 800.0), "recall_cell": (I, 1),
        "n_cells": (I, 3), "cell_spacing_mhz": (F, 4.0),
        "recall_times_us": (LIST, (450.0, 850.0)),
        "jitter_sigma_khz": (F, 0.0), "jitter_cycles": (I, 0),
        "dt_out_us": (F, 0.05), "seed": (I, 1),
    },
    "fit": {"model": (S, "exp4"), "bin_width_us": (F, 1.0),
            "background": (B, False)},
}


@dataclass(frozen=True)
class Config:
    sections: dict

    def __getitem__(self, section: str) -> dict:
        return self.sections[section]

    def get(self, section: str, key: str):
        return self.sections[section][key]


def defaults() -> Config:
    return Config({s: {k: v for k, (_, v) in keys.items()}
                   for s, keys in SCHEMA.items()})


def _parse_value(kind: str, raw: str, lineno: int, key: str):
    raw = raw.strip()
    try:
        if kind == F:
            return float(raw)
        if kind == I:
            return int(raw)
        if kind == B:
            low = raw.lower()
            if low in ("true", "yes", "on", "1"):
                return True
            if low in ("false", "no", "off", "0"):
                return False
            raise ValueError(raw)
        if kind == LIST:
            return tuple(float(x) for x in raw.split(",") if x.strip())
        return raw
    except ValueError:
        raise ConfigError(f"line {lineno}: cannot parse {key!r} value {raw!r} "
                          f"as {kind}") from None


def parse_config(text: str, origin: str = "<config>") -> Config:
    cfg = defaults()
    section = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith(("#", ";")):
            continue
        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise ConfigError(f"{origin}: line {lineno}: malformed section header")
            section = stripped[1:-1].strip()
            if section not in SCHEMA:
                raise ConfigError(f"{origin}: line {lineno}: unknown section "
                                  f"[{section}]")
            continue
        if "=" not in stripped:
            raise ConfigError(f"{origin}: line {lineno}: expected 'key = value'")
        if section is None:
            raise ConfigError(f"{origin}: line {lineno}: key outside any section")
        key, raw = stripped.split("=", 1)
        key = key.strip()
        if key not in SCHEMA[section]:
            raise ConfigError(f"{origin}: line {lineno}: unknown key {key!r} "
                              f"in section [{section}]")
        kind = SCHEMA[section][key][0]
        try:
            cfg.sections[section][key] = _parse_value(kind, raw, lineno, key)
        except ConfigError as err:
            raise ConfigError(f"{origin}: {err}") from None
    return cfg


def load_config(path) -> Config:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return parse_config(fh.read(), origin=str(path))
    except OSError as err:
        raise ConfigError(f"cannot read config {path}: {err}") from None
