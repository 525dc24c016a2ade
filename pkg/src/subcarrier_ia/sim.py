"""
Monte Carlo sum-rate sweep over the subcarrier spacing.

Every trial draws its own scenario from a counter-based substream of the
master seed, so the aggregate is the same for any worker count. The x-axis
is the spacing in units of each trial's own minimal feasible spacing.
"""

from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .alignment import _ia_zf_rates
from .baselines import _int_as_noise_rates, _tdma_rates
from .channel import ScenarioConfig, calibrate_noise, sample_scenario
from .los import channel_batch, spacing_analysis, upper_bound

COLUMNS = ("x_norm", "ia_zf", "max_ia_zf", "ia_upper_bound", "tdma", "int_as_noise")
THREADS_ENV = "IA_SIM_THREADS"


@dataclass(frozen=True)
class SweepConfig:
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    snr_db: float = 20.0
    trials: int = 10_000
    x_max: float = 3.0
    x_points: int = 61
    grid_per_dfmin: int = 20
    master_seed: int = 0
    f0: float = 0.0

    def __post_init__(self):
        if self.scenario.k != 3:
            raise ValueError("the spacing sweep is defined for K = 3")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.x_max > 0:
            raise ValueError("x_max must be > 0")
        if self.x_points < 2:
            raise ValueError("x_points must be >= 2")
        if self.grid_per_dfmin < 1:
            raise ValueError("grid_per_dfmin must be >= 1")

    @property
    def x_norm(self) -> np.ndarray:
        return np.linspace(0.0, self.x_max, self.x_points)


@dataclass(frozen=True, eq=False)
class SweepResult:
    """Trial-averaged sum-rates (bits per OFDM block), one row per x point."""

    x_norm: np.ndarray
    ia_zf: np.ndarray
    max_ia_zf: np.ndarray
    ia_upper_bound: np.ndarray
    tdma: np.ndarray
    int_as_noise: np.ndarray

    @property
    def rows(self) -> list[tuple[float, ...]]:
        return [tuple(float(c) for c in row) for row in self.as_array()]

    def as_array(self) -> np.ndarray:
        return np.column_stack([getattr(self, name) for name in COLUMNS])

    def violations(self, rtol: float = 1e-12) -> list[str]:
        """Broken structural invariants; empty when the result is consistent."""
        problems = []
        if np.any(np.diff(self.x_norm) <= 0):
            problems.append("x_norm not strictly increasing")
        if np.any(np.diff(self.max_ia_zf) < 0):
            problems.append("max_ia_zf decreases")
        if np.any(self.ia_zf > self.max_ia_zf):
            problems.append("ia_zf exceeds max_ia_zf")
        if np.any(self.max_ia_zf > self.ia_upper_bound * (1 + rtol)):
            problems.append("max_ia_zf exceeds ia_upper_bound")
        return problems

    def to_csv(self, fh) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(COLUMNS)
        for row in self.rows:
            writer.writerow([repr(v) for v in row])

    def to_csv_string(self) -> str:
        buf = io.StringIO()
        self.to_csv(buf)
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {name: [float(v) for v in getattr(self, name)] for name in COLUMNS}


def _trial(cfg: SweepConfig, noise_variance: float, trial: int) -> np.ndarray:
    scn = sample_scenario(cfg.scenario, cfg.master_seed, trial).with_noise_variance(noise_variance)
    sa = spacing_analysis(scn)
    if sa.degenerate:
        raise RuntimeError(f"trial {trial}: degenerate delay combination")
    x = cfg.x_norm
    sub = np.arange(1, int(np.floor(cfg.x_max * cfg.grid_per_dfmin)) + 1) / cfg.grid_per_dfmin
    units = np.unique(np.concatenate([x, sub[sub <= cfg.x_max]]))
    coeffs = channel_batch(scn, units * sa.delta_f_min, cfg.f0)

    ia = _ia_zf_rates(coeffs, noise_variance).sum(axis=-1)
    best = np.maximum.accumulate(ia)
    at_x = np.searchsorted(units, x)
    on_x = coeffs[at_x]

    out = np.empty((x.size, len(COLUMNS) - 1))
    out[:, 0] = ia[at_x]
    out[:, 1] = best[at_x]
    out[:, 2] = upper_bound(scn)
    out[:, 3] = _tdma_rates(on_x, noise_variance).sum(axis=-1)
    out[:, 4] = _int_as_noise_rates(on_x, noise_variance).sum(axis=-1)
    return out


def _worker_count(workers: int | None) -> int:
    if workers is None:
        workers = int(os.environ.get(THREADS_ENV, os.cpu_count() or 1))
    return max(1, workers)


def run_sweep(cfg: SweepConfig, workers: int | None = None) -> SweepResult:
    """Average IA-ZF, best IA-ZF within the bandwidth, the IA bound and both baselines.

    ``workers`` defaults to ``$IA_SIM_THREADS`` (or the CPU count). Results
    are reduced in trial order and do not depend on it.
    """
    noise_variance = calibrate_noise(cfg.scenario, cfg.snr_db)
    workers = min(_worker_count(workers), cfg.trials)
    if workers == 1:
        per_trial = [_trial(cfg, noise_variance, t) for t in range(cfg.trials)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_trial = list(
                pool.map(lambda t: _trial(cfg, noise_variance, t), range(cfg.trials))
            )
    mean = np.mean(np.stack(per_trial), axis=0)
    return SweepResult(cfg.x_norm, *mean.T)


@dataclass(frozen=True, eq=False)
class DfminSummary:
    samples: np.ndarray
    quantiles: dict[float, float]
    bin_edges: np.ndarray
    counts: np.ndarray

    def fraction_between(self, low: float, high: float) -> float:
        return float(np.mean((self.samples >= low) & (self.samples <= high)))

    def to_dict(self) -> dict:
        return {
            "trials": int(self.samples.size),
            "quantiles": {f"{q:g}": v for q, v in self.quantiles.items()},
            "histogram": {
                "log10_bin_edges": [float(e) for e in np.log10(self.bin_edges)],
                "counts": [int(c) for c in self.counts],
            },
            "fraction_1e6_1e8": self.fraction_between(1e6, 1e8),
        }


# four bins per decade from 1 kHz to 100 GHz; samples outside land in the end bins
DFMIN_BIN_EDGES = 10.0 ** np.arange(3.0, 11.0 + 1e-9, 0.25)


def dfmin_distribution(cfg: ScenarioConfig, trials: int, seed: int) -> DfminSummary:
    """Sample the minimal feasible spacing over random three-user scenarios."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    samples = np.array(
        [spacing_analysis(sample_scenario(cfg, seed, t)).delta_f_min for t in range(trials)]
    )
    probs = (0.025, 0.5, 0.975)
    quantiles = dict(zip(probs, (float(q) for q in np.quantile(samples, probs))))
    clipped = np.clip(samples, DFMIN_BIN_EDGES[0], DFMIN_BIN_EDGES[-1])
    counts, _ = np.histogram(clipped, bins=DFMIN_BIN_EDGES)
    return DfminSummary(samples, quantiles, DFMIN_BIN_EDGES.copy(), counts)


def sweep_config_dict(cfg: SweepConfig) -> dict:
    return asdict(cfg)


def sweep_to_json(result: SweepResult, cfg: SweepConfig) -> str:
    return json.dumps({"config": sweep_config_dict(cfg), "columns": result.to_dict()}, indent=2)
