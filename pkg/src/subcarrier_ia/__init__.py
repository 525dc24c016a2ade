"""Interference alignment over two OFDM subcarriers for line-of-sight channels."""

from .alignment import (
    AlignmentSystem,
    BeamformerSet,
    FeasibilityReport,
    aligned_rhs,
    build_system,
    effective_channels,
    feasibility,
    ia_sum_rate,
    leakage,
    least_squares,
    max_normalized_leakage,
    solve_beamformers,
    theorem1_residual,
)
from .baselines import RateReport, Scheme, interference_as_noise_sum_rate, tdma_sum_rate
from .channel import (
    ChannelSet,
    LosLink,
    Scenario,
    ScenarioConfig,
    SubcarrierPair,
    calibrate_noise,
    channel_at,
    frequency_response,
    load_scenario,
    sample_scenario,
    save_scenario,
)
from .exceptions import (
    Corollary1IsThreeUser,
    OrthogonalityViolated,
    Theorem1IsThreeUser,
    UnsupportedK,
)
from .los import (
    SpacingAnalysis,
    best_spacing,
    effective_amplitudes,
    los_feasible,
    min_time_ia_residual,
    spacing_analysis,
    time_ia_residual,
    upper_bound,
)
from .sim import SweepConfig, SweepResult, dfmin_distribution, run_sweep

__version__ = "0.1.0"
