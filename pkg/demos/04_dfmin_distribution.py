"""
How large is the minimal spacing?
=================================

Sample many placements and look at the spread of the minimal feasible
spacing on a log scale.
"""

import numpy as np

from subcarrier_ia import ScenarioConfig
from subcarrier_ia.sim import dfmin_distribution

summary = dfmin_distribution(ScenarioConfig(), trials=10_000, seed=0)
print("quantiles (Hz):", {q: f"{v:.3g}" for q, v in summary.quantiles.items()})
print(f"fraction in [1 MHz, 100 MHz]: {summary.fraction_between(1e6, 1e8):.1%}")

# text histogram, one row per quarter decade
peak = summary.counts.max()
for lo, count in zip(np.log10(summary.bin_edges[:-1]), summary.counts):
    if count:
        print(f"10^{lo:5.2f} {'#' * int(60 * count / peak)}")
