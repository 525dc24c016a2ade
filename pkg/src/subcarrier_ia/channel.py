"""
Line-of-sight scenario generation and frequency-domain channel evaluation.

A scenario holds one single-tap path (delay, amplitude) for every
transmitter/receiver combination of a K-pair interference channel. On an
OFDM subcarrier at frequency ``f`` such a path contributes the complex gain
``amplitude * exp(-j 2 pi f delay)``, so on two orthogonal subcarriers every
link is a diagonal 2x2 matrix whose two entries share the same amplitude.

Index convention: entry ``(i, k)`` is the path from transmitter ``k`` to
receiver ``i`` (zero-based in the API, one-based in JSON files).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from scipy import integrate

SPEED_OF_LIGHT = 3e8


def _frozen(array, dtype=float):
    out = np.array(array, dtype=dtype)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class LosLink:
    """A single propagation path: delay in seconds, linear amplitude gain."""

    delay: float
    amplitude: float

    def __post_init__(self):
        if not np.isfinite(self.delay) or self.delay < 0:
            raise ValueError(f"delay must be finite and >= 0, got {self.delay}")
        if not self.amplitude > 0:
            raise ValueError(f"amplitude must be > 0, got {self.amplitude}")


@dataclass(frozen=True)
class ScenarioConfig:
    """Parameters of the random line-of-sight deployment.

    Parameters
    ----------
    k : int
        Number of user pairs.
    direct_distance_range, cross_distance_range : (float, float)
        Closed intervals (meters) that direct and cross distances are drawn
        uniformly from.
    path_loss_exponent : float
        Amplitude decays as ``(1 m / d) ** path_loss_exponent``.
    wave_speed : float
        Propagation speed in m/s; delays are ``d / wave_speed``.
    """

    k: int = 3
    direct_distance_range: tuple[float, float] = (150.0, 250.0)
    cross_distance_range: tuple[float, float] = (250.0, 350.0)
    path_loss_exponent: float = 3.76
    wave_speed: float = SPEED_OF_LIGHT

    def __post_init__(self):
        if self.k < 3:
            raise ValueError(f"k must be >= 3, got {self.k}")
        for name in ("direct_distance_range", "cross_distance_range"):
            low, high = getattr(self, name)
            if not 0 < low <= high:
                raise ValueError(f"{name} must satisfy 0 < low <= high, got {(low, high)}")
            object.__setattr__(self, name, (float(low), float(high)))
        if not self.path_loss_exponent > 0:
            raise ValueError("path_loss_exponent must be > 0")
        if not self.wave_speed > 0:
            raise ValueError("wave_speed must be > 0")


@dataclass(frozen=True, eq=False)
class Scenario:
    """K x K grid of line-of-sight links plus the shared noise variance.

    ``delays``, ``amplitudes`` and ``distances`` are read-only ``(K, K)``
    arrays. The diagonal holds the direct links.
    """

    delays: np.ndarray
    amplitudes: np.ndarray
    distances: np.ndarray
    noise_variance: float = 1.0

    def __post_init__(self):
        delays = _frozen(self.delays)
        amplitudes = _frozen(self.amplitudes)
        distances = _frozen(self.distances)
        if delays.ndim != 2 or delays.shape[0] != delays.shape[1]:
            raise ValueError(f"delays must be a square matrix, got shape {delays.shape}")
        if amplitudes.shape != delays.shape or distances.shape != delays.shape:
            raise ValueError("delays, amplitudes and distances must share one shape")
        if delays.shape[0] < 3:
            raise ValueError(f"a scenario needs K >= 3 pairs, got {delays.shape[0]}")
        if not np.all(np.isfinite(delays)) or np.any(delays <= 0):
            raise ValueError("all delays must be finite and > 0")
        if np.any(~(amplitudes > 0)):
            raise ValueError("all amplitudes must be > 0")
        if not self.noise_variance > 0:
            raise ValueError("noise_variance must be > 0")
        object.__setattr__(self, "delays", delays)
        object.__setattr__(self, "amplitudes", amplitudes)
        object.__setattr__(self, "distances", distances)
        object.__setattr__(self, "noise_variance", float(self.noise_variance))

    @property
    def k(self) -> int:
        return self.delays.shape[0]

    def link(self, i: int, k: int) -> LosLink:
        """Path from transmitter ``k`` to receiver ``i``."""
        return LosLink(float(self.delays[i, k]), float(self.amplitudes[i, k]))

    def with_noise_variance(self, noise_variance: float) -> Scenario:
        return replace(self, noise_variance=noise_variance)

    def __eq__(self, other):
        if not isinstance(other, Scenario):
            return NotImplemented
        return (
            np.array_equal(self.delays, other.delays)
            and np.array_equal(self.amplitudes, other.amplitudes)
            and np.array_equal(self.distances, other.distances)
            and self.noise_variance == other.noise_variance
        )

    __hash__ = None


@dataclass(frozen=True)
class SubcarrierPair:
    """Two distinct subcarrier frequencies in Hz."""

    f1: float
    f2: float

    def __post_init__(self):
        if not (np.isfinite(self.f1) and np.isfinite(self.f2)):
            raise ValueError("subcarrier frequencies must be finite")
        if self.f1 == self.f2:
            raise ValueError("subcarriers must be distinct (f1 != f2)")

    @property
    def spacing(self) -> float:
        return self.f2 - self.f1

    @classmethod
    def from_spacing(cls, delta_f: float, f0: float = 0.0) -> SubcarrierPair:
        return cls(f0, f0 + delta_f)


@dataclass(frozen=True, eq=False)
class ChannelSet:
    """Frequency-domain channels of all K^2 links on two subcarriers.

    ``coefficients[i, k, l]`` is the diagonal entry of ``H_{i,k}`` on
    subcarrier ``l`` (0 or 1). Every coefficient must be nonzero.
    """

    coefficients: np.ndarray = field(repr=False)

    def __post_init__(self):
        coeffs = _frozen(self.coefficients, dtype=complex)
        if coeffs.ndim != 3 or coeffs.shape[0] != coeffs.shape[1] or coeffs.shape[2] != 2:
            raise ValueError(f"coefficients must have shape (K, K, 2), got {coeffs.shape}")
        if np.any(coeffs == 0) or not np.all(np.isfinite(coeffs)):
            raise ValueError("every channel coefficient must be finite and nonzero")
        object.__setattr__(self, "coefficients", coeffs)

    @property
    def k(self) -> int:
        return self.coefficients.shape[0]

    def matrix(self, i: int, k: int) -> np.ndarray:
        """The diagonal 2x2 matrix ``H_{i,k}``."""
        return np.diag(self.coefficients[i, k])


def trial_rng(seed: int, trial_index: int) -> np.random.Generator:
    """Counter-based generator for one trial.

    The stream depends only on ``(seed, trial_index)``, so trials can be
    evaluated in any order or in parallel.
    """
    seq = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(trial_index),))
    return np.random.Generator(np.random.Philox(seq))


def scenario_from_distances(distances, cfg: ScenarioConfig, noise_variance: float = 1.0) -> Scenario:
    """Build a scenario from a K x K distance matrix (meters)."""
    distances = np.asarray(distances, dtype=float)
    return Scenario(
        delays=distances / cfg.wave_speed,
        amplitudes=(1.0 / distances) ** cfg.path_loss_exponent,
        distances=distances,
        noise_variance=noise_variance,
    )


def sample_scenario(cfg: ScenarioConfig, seed: int, trial_index: int) -> Scenario:
    """Draw one random scenario.

    Direct distances are uniform on ``cfg.direct_distance_range``, cross
    distances uniform on ``cfg.cross_distance_range``, all independent. The
    result is a pure function of ``(cfg, seed, trial_index)``. The noise
    variance is left at 1.0; see :func:`calibrate_noise`.
    """
    rng = trial_rng(seed, trial_index)
    shape = (cfg.k, cfg.k)
    direct = rng.uniform(*cfg.direct_distance_range, size=shape)
    cross = rng.uniform(*cfg.cross_distance_range, size=shape)
    distances = np.where(np.eye(cfg.k, dtype=bool), direct, cross)
    return scenario_from_distances(distances, cfg)


def frequency_response(link: LosLink, f):
    """Complex gain of ``link`` at frequency ``f`` (Hz); ``f`` may be an array."""
    return link.amplitude * np.exp(-2j * np.pi * np.asarray(f, dtype=float) * link.delay)


def channel_at(scn: Scenario, sc: SubcarrierPair) -> ChannelSet:
    """Evaluate every link of ``scn`` on both subcarriers of ``sc``."""
    freqs = np.array([sc.f1, sc.f2])
    phase = np.exp(-2j * np.pi * freqs * scn.delays[..., None])
    return ChannelSet(scn.amplitudes[..., None] * phase)


def mean_direct_power(cfg: ScenarioConfig) -> float:
    """Expected direct-channel power ``E[(1 m / d) ** (2 gamma)]``, d uniform."""
    low, high = cfg.direct_distance_range
    two_gamma = 2.0 * cfg.path_loss_exponent
    if low == high:
        return low ** -two_gamma
    # integrate the dimensionless (low / d) ** 2g so quad works on O(1) values
    value, _ = integrate.quad(
        lambda d: (low / d) ** two_gamma, low, high, epsabs=0.0, epsrel=1e-13, limit=200
    )
    return value / (high - low) * low ** -two_gamma


def calibrate_noise(cfg: ScenarioConfig, snr_db: float) -> float:
    """Noise variance giving an average direct-link SNR of ``snr_db``.

    Transmit power is one per OFDM block.
    """
    if not np.isfinite(snr_db):
        raise ValueError("snr_db must be finite")
    return mean_direct_power(cfg) / 10.0 ** (snr_db / 10.0)


# -- JSON ----------------------------------------------------------------------


def scenario_to_dict(scn: Scenario) -> dict:
    links = []
    for i in range(scn.k):
        for k in range(scn.k):
            links.append(
                {
                    "rx": i + 1,
                    "tx": k + 1,
                    "distance_m": float(scn.distances[i, k]),
                    "delay_s": float(scn.delays[i, k]),
                    "amplitude": float(scn.amplitudes[i, k]),
                }
            )
    return {"k": scn.k, "noise_variance": scn.noise_variance, "links": links}


def scenario_from_dict(data: dict) -> Scenario:
    """Inverse of :func:`scenario_to_dict`; all K^2 links must be present."""
    try:
        k = int(data["k"])
        links = data["links"]
        noise_variance = float(data.get("noise_variance", 1.0))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed scenario document: {exc}") from exc
    if k < 3:
        raise ValueError(f"scenario needs k >= 3, got {k}")
    delays = np.full((k, k), np.nan)
    amplitudes = np.full((k, k), np.nan)
    distances = np.full((k, k), np.nan)
    for entry in links:
        try:
            i, j = int(entry["rx"]) - 1, int(entry["tx"]) - 1
            if not (0 <= i < k and 0 <= j < k):
                raise ValueError(f"link index out of range: rx={i + 1}, tx={j + 1}")
            if not np.isnan(delays[i, j]):
                raise ValueError(f"duplicate link rx={i + 1}, tx={j + 1}")
            delays[i, j] = float(entry["delay_s"])
            amplitudes[i, j] = float(entry["amplitude"])
            distances[i, j] = float(entry.get("distance_m", np.nan))
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed link entry {entry!r}: {exc}") from exc
    if np.isnan(delays).any():
        raise ValueError(f"scenario must list all {k * k} links")
    return Scenario(delays, amplitudes, distances, noise_variance)


def load_scenario(path) -> Scenario:
    path = Path(path)
    with path.open(encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: invalid JSON ({exc})") from exc
    try:
        return scenario_from_dict(data)
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from exc


def save_scenario(scn: Scenario, path) -> None:
    with Path(path).open("w", encoding="utf-8", newline="\n") as fh:
        json.dump(scenario_to_dict(scn), fh, indent=2)
        fh.write("\n")
