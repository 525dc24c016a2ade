import sys
from pathlib import Path

import numpy as np
import pytest

from subcarrier_ia import Scenario, ScenarioConfig, calibrate_noise, sample_scenario

sys.path.insert(0, str(Path(__file__).parent))

DEFAULT_CFG = ScenarioConfig()
SNR_DB = 20.0

_acceptance_lines = []


def record_criterion(name: str, passed: bool, detail: str = "") -> None:
    _acceptance_lines.append(f"[{'PASS' if passed else 'FAIL'}] {name}" + (f" -- {detail}" if detail else ""))


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)


def los_scenarios(count, seed=2024, snr_db=SNR_DB, cfg=DEFAULT_CFG):
    noise = calibrate_noise(cfg, snr_db)
    return [sample_scenario(cfg, seed, t).with_noise_variance(noise) for t in range(count)]


def scenario_from_delays(delays, amplitudes=None, noise_variance=1.0):
    delays = np.asarray(delays, dtype=float)
    if amplitudes is None:
        amplitudes = np.ones_like(delays)
    return Scenario(delays, amplitudes, np.full_like(delays, np.nan), noise_variance)


def example_delays(tau31=5.0, direct=(1.0, 1.0, 1.0)):
    """Delays (microseconds -> seconds) of the worked spacing example."""
    t = np.zeros((3, 3))
    t[0, 2], t[0, 1], t[1, 0], t[1, 2], t[2, 1], t[2, 0] = 3, 2, 4, 1, 2, tau31
    t[np.diag_indices(3)] = direct
    return t * 1e-6


@pytest.fixture
def default_cfg():
    return DEFAULT_CFG


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
