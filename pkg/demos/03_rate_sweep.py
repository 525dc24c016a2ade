"""
Average sum-rate against normalized spacing
===========================================

Monte Carlo average over random line-of-sight placements at 20 dB. The IA-ZF
curve peaks at integer multiples; both baselines do not depend on spacing.
Pass a path as the first argument to also save the CSV.
"""

import sys

from subcarrier_ia import SweepConfig, run_sweep

cfg = SweepConfig(trials=1000, x_max=10.0, x_points=41, master_seed=0)
result = run_sweep(cfg)

print(f"{'x':>5} {'ia_zf':>7} {'best':>7} {'bound':>7} {'tdma':>7} {'ian':>7}")
for row in result.rows:
    print(" ".join(f"{v:7.3f}" if i else f"{v:5.2f}" for i, v in enumerate(row)))

print("consistency problems:", result.violations() or "none")
if len(sys.argv) > 1:
    with open(sys.argv[1], "w", newline="") as fh:
        result.to_csv(fh)
