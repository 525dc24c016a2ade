"""
Feasibility of alignment on two subcarriers
===========================================

Build the log-domain linear system for a three-user channel, check whether it
is consistent, and solve for zero-forcing filters.
"""

import numpy as np

from subcarrier_ia import (
    ChannelSet,
    build_system,
    feasibility,
    max_normalized_leakage,
    solve_beamformers,
    theorem1_residual,
)

rng = np.random.default_rng(0)

# A generic random channel is almost never alignable: one residual row, K=3
c = rng.normal(size=(3, 3, 2)) + 1j * rng.normal(size=(3, 3, 2))
ch = ChannelSet(c)
sys = build_system(ch)
print("incidence matrix:\n", sys.A)
print("generic channel:", feasibility(sys).to_dict())
print("closed-form residual:", theorem1_residual(ch))

# Force the product condition by editing one cross ratio
ratio = np.prod([c[i, k, 1] / c[i, k, 0] for i, k in [(1, 2), (2, 0)]]) / np.prod(
    [c[i, k, 1] / c[i, k, 0] for i, k in [(0, 2), (1, 0), (2, 1)]]
)
c[0, 1, 1] = c[0, 1, 0] / ratio
ch = ChannelSet(c)
sys = build_system(ch)
print("\nedited channel:", feasibility(sys).to_dict())

bf = solve_beamformers(sys)
print("normalized leakage after zero forcing:", max_normalized_leakage(ch, bf))
print("filter norms:", np.linalg.norm(bf.u, axis=1), np.linalg.norm(bf.v, axis=1))
