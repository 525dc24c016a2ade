"""
Reference schemes: TDMA and treating interference as noise.

All rates are in bits per OFDM block, i.e. per joint use of both
subcarriers. Each transmitter has unit power per block. Two-stream schemes
split it evenly over the subcarriers; TDMA transmits in 1/K of the blocks
with K times the power.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .channel import ChannelSet


class Scheme(str, enum.Enum):
    IA_ZF = "IA-ZF"
    TDMA = "TDMA"
    INT_AS_NOISE = "IntAsNoise"
    IA_UPPER_BOUND = "IA-UpperBound"


@dataclass(frozen=True, eq=False)
class RateReport:
    scheme: Scheme
    per_pair: np.ndarray

    def __post_init__(self):
        per_pair = np.array(self.per_pair, dtype=float)
        if np.any(per_pair < 0):
            raise ValueError("rates must be non-negative")
        per_pair.flags.writeable = False
        object.__setattr__(self, "per_pair", per_pair)

    @property
    def sum(self) -> float:
        return float(np.sum(self.per_pair))


def _tdma_rates(coeffs, noise_variance):
    k = coeffs.shape[-2]
    direct = np.abs(np.diagonal(coeffs, axis1=-3, axis2=-2)) ** 2  # (..., 2, K)
    rates = np.log2(1.0 + 0.5 * k * direct / noise_variance).sum(axis=-2) / k
    return rates


def _int_as_noise_rates(coeffs, noise_variance):
    k = coeffs.shape[-2]
    power = 0.5 * np.abs(coeffs) ** 2  # (..., K, K, 2)
    eye = np.eye(k, dtype=bool)[..., None]
    signal = np.where(eye, power, 0.0).sum(axis=-2)
    interference = np.where(eye, 0.0, power).sum(axis=-2)
    return np.log2(1.0 + signal / (noise_variance + interference)).sum(axis=-1)


def tdma_sum_rate(ch: ChannelSet, noise_variance: float) -> RateReport:
    """Each pair alone in 1/K of the blocks, K-fold power, one stream per subcarrier."""
    if not noise_variance > 0:
        raise ValueError("noise_variance must be > 0")
    return RateReport(Scheme.TDMA, _tdma_rates(ch.coefficients, noise_variance))


def interference_as_noise_sum_rate(ch: ChannelSet, noise_variance: float) -> RateReport:
    """All pairs active with one stream per subcarrier; interference counted as noise."""
    if not noise_variance > 0:
        raise ValueError("noise_variance must be > 0")
    return RateReport(Scheme.INT_AS_NOISE, _int_as_noise_rates(ch.coefficients, noise_variance))
