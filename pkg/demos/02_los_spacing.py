"""
Choosing the subcarrier spacing in line of sight
================================================

In a pure line-of-sight channel every ratio h2/h1 has unit modulus and a
phase linear in the spacing. Alignment becomes feasible exactly at integer
multiples of a minimal spacing set by six cross-link delays.
"""

import numpy as np

from subcarrier_ia import (
    ScenarioConfig,
    SubcarrierPair,
    build_system,
    calibrate_noise,
    channel_at,
    effective_amplitudes,
    feasibility,
    los_feasible,
    sample_scenario,
    spacing_analysis,
    upper_bound,
)
from subcarrier_ia.los import best_spacing

cfg = ScenarioConfig()
scn = sample_scenario(cfg, seed=1, trial_index=0).with_noise_variance(calibrate_noise(cfg, 20.0))
sa = spacing_analysis(scn)
print(f"delay combination {sa.delta_tau_sum * 1e9:.2f} ns -> minimal spacing {sa.delta_f_min / 1e6:.3f} MHz")

for x in (0.5, 1.0, 1.5, 2.0, 3.0):
    df = x * sa.delta_f_min
    ok, n = los_feasible(scn, df)
    report = feasibility(build_system(channel_at(scn, SubcarrierPair.from_spacing(df, 2.4e9))))
    multiple = f"n={n}" if ok else "no multiple"
    print(f"x = {x:3.1f}: closed form {ok!s:5} ({multiple}), linear system {report.feasible}")

print("\neffective amplitude relative to the direct link, per multiple:")
for n in range(1, 6):
    print(n, np.round(effective_amplitudes(scn, n) / np.diag(scn.amplitudes), 3))

print(f"\nupper bound {upper_bound(scn):.3f} bits/block")
for mult in (1, 10, 100):
    df, rate = best_spacing(scn, mult * sa.delta_f_min)
    print(f"best within {mult:3d} x minimal spacing: {rate:.3f} at {df / sa.delta_f_min:.2f} x")
