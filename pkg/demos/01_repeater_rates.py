"""Closed-form repeater model: distance curves and the (T2, eta_o) heatmap.

Reproduces the headline comparison: a multiplexed repeater with M = m_s*m_t
modes per cycle against direct fiber transmission, with the link count
optimized at every distance.
"""

import numpy as np

from chirpecho import (MemoryModel, RepeaterParams, SweepSpec, optimize_links,
                       required_storage_time, sweep_distance,
                       sweep_ratio_heatmap, LinkConfig)

mem = MemoryModel(eta_o=0.65, t2=3e-3)
distances = tuple(np.arange(10.0, 1010.0, 10.0))

print("== Repeater vs direct transmission, optimized link count ==")
for m_s in (3, 10, 100):
    params = RepeaterParams(m_s=m_s)  # m_t = 20 -> M = 60 / 200 / 2000
    rows = sweep_distance(SweepSpec(params=params, mem=mem,
                                    distances_km=distances))
    cross = next((r for r in rows if r.ratio > 1.0), None)
    best = max(rows, key=lambda r: r.ratio)
    print(f"M = {params.modes:5d}: crossover at "
          f"{cross.length_km if cross else float('nan'):6.0f} km, "
          f"best ratio {best.ratio:9.3g} at {best.length_km:.0f} km "
          f"(n_l* = {best.n_links_opt})")

params = RepeaterParams(m_s=3)
print("\n== Optimal configuration at 500 km, M = 60 ==")
opt = optimize_links(params, mem, 500.0)
print(f"n_l* = {opt.n_links}, P_s = {opt.p_success:.3e}, "
      f"T_s = {opt.storage_time * 1e3:.3f} ms")
print(f"a 200 km elementary link needs "
      f"{required_storage_time(params, LinkConfig(200.0, 1)) * 1e3:.3f} ms of storage")

print("\n== Memory requirements at 500 km (ratio > 1 wins) ==")
spec = SweepSpec(params=params, mem=mem,
                 t2_grid_s=tuple(np.linspace(0.5e-3, 4e-3, 8)),
                 eta_o_grid=tuple(np.linspace(0.1, 0.9, 9)))
cells = sweep_ratio_heatmap(spec)
for marker in ("star", "triangle"):
    cell = next(c for c in cells if c.marker == marker)
    word = "beats" if cell.ratio > 1 else "trails"
    print(f"{marker:8s} (T2 = {cell.t2_s * 1e3:.3g} ms, eta_o = {cell.eta_o:.2%}): "
          f"ratio {cell.ratio:.3g} -> {word} direct transmission")

t2_need = min((c for c in cells if not c.marker and c.ratio > 1.0),
              key=lambda c: (c.t2_s, c.eta_o), default=None)
if t2_need:
    print(f"cheapest winning grid point: T2 = {t2_need.t2_s * 1e3:.2g} ms, "
          f"eta_o = {t2_need.eta_o:.0%}")
