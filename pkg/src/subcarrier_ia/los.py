"""
Closed-form machinery for three user pairs with line-of-sight channels.

For single-tap links the subcarrier amplitudes coincide and only phase
rotations ``2 pi f tau`` remain, so the three-user alignment condition
reduces to ``delta_f * delta_tau_sum = n`` for a nonzero integer ``n``, with

    delta_tau_sum = tau_13 - tau_12 + tau_21 - tau_23 + tau_32 - tau_31.

The minimal feasible spacing is therefore ``1 / |delta_tau_sum|`` and every
nonzero multiple of it works as well. At ``delta_f = n * delta_f_min`` the
effective direct gains are ``|h_ii| |sin(pi n delta_f_min delta_tau_i)|``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .alignment import _ia_zf_rates
from .channel import Scenario
from .exceptions import Corollary1IsThreeUser, OrthogonalityViolated

DEFAULT_GRID_PER_DFMIN = 20


def _require_three(scn: Scenario):
    if scn.k != 3:
        raise Corollary1IsThreeUser(f"line-of-sight closed forms are for K = 3, got {scn.k}")


@dataclass(frozen=True)
class SpacingAnalysis:
    delta_tau_sum: float
    delta_f_min: float
    degenerate: bool


@dataclass(frozen=True)
class EffectiveAmplitudeSpec:
    delta_tau: tuple[float, float, float]


def spacing_analysis(scn: Scenario) -> SpacingAnalysis:
    """Minimal subcarrier spacing making three-user alignment feasible.

    ``delta_f_min`` is infinite for the degenerate case
    ``delta_tau_sum == 0`` where every spacing works.
    """
    _require_three(scn)
    t = scn.delays
    total = t[0, 2] - t[0, 1] + t[1, 0] - t[1, 2] + t[2, 1] - t[2, 0]
    if total == 0:
        return SpacingAnalysis(0.0, math.inf, True)
    return SpacingAnalysis(float(total), float(1.0 / abs(total)), False)


def delay_differences(scn: Scenario) -> EffectiveAmplitudeSpec:
    """The per-pair delay combinations entering the effective gains."""
    _require_three(scn)
    t = scn.delays
    return EffectiveAmplitudeSpec(
        (
            float(-t[0, 0] + t[1, 0] - t[1, 2] + t[0, 2]),
            float(-t[1, 1] + t[1, 2] - t[0, 2] + t[0, 1]),
            float(-t[2, 2] + t[2, 1] - t[0, 1] + t[0, 2]),
        )
    )


def los_feasible(scn: Scenario, delta_f: float, tol: float = 1e-9) -> tuple[bool, int]:
    """Whether ``delta_f`` is (within ``tol``) a nonzero multiple of the minimal spacing.

    Returns ``(feasible, nearest_n)`` where ``nearest_n`` may be negative.
    A degenerate scenario is feasible at every spacing and reports ``n = 0``.
    """
    if not delta_f > 0:
        raise ValueError("delta_f must be > 0")
    sa = spacing_analysis(scn)
    if sa.degenerate:
        return True, 0
    q = delta_f * sa.delta_tau_sum
    n = round(q)
    return bool(abs(q - n) <= tol and n != 0), int(n)


def effective_amplitudes(scn: Scenario, n: int) -> np.ndarray:
    """Closed-form ``|h_eff,i|`` at spacing ``n * delta_f_min``."""
    if n == 0:
        raise OrthogonalityViolated("n = 0 puts both subcarriers on the same frequency")
    sa = spacing_analysis(scn)
    if sa.degenerate:
        raise ValueError("effective amplitudes need a non-degenerate scenario")
    dtau = np.array(delay_differences(scn).delta_tau)
    return np.diag(scn.amplitudes) * np.abs(np.sin(np.pi * n * sa.delta_f_min * dtau))


def upper_bound(scn: Scenario) -> float:
    """Sum-rate bound with every effective gain at its maximum ``|h_ii|``."""
    _require_three(scn)
    snr = np.diag(scn.amplitudes) ** 2 / scn.noise_variance
    return float(np.sum(np.log2(1.0 + snr)))


def channel_batch(scn: Scenario, delta_fs, f0: float = 0.0) -> np.ndarray:
    """Coefficients at subcarriers ``(f0, f0 + delta_f)`` for many spacings.

    Returns shape ``(N, K, K, 2)``.
    """
    delta_fs = np.atleast_1d(np.asarray(delta_fs, dtype=float))
    freqs = np.stack([np.full_like(delta_fs, f0), f0 + delta_fs], axis=-1)  # (N, 2)
    phase = np.exp(-2j * np.pi * freqs[:, None, None, :] * scn.delays[None, :, :, None])
    return scn.amplitudes[None, :, :, None] * phase


def ia_zf_sum_rates(scn: Scenario, delta_fs, f0: float = 0.0) -> np.ndarray:
    """IA-ZF sum-rate (bits/block) at each spacing in ``delta_fs``.

    Same computation as ``channel_at`` -> ``build_system`` ->
    ``solve_beamformers`` -> ``leakage`` -> ``ia_sum_rate``, vectorized.
    """
    coeffs = channel_batch(scn, delta_fs, f0)
    return _ia_zf_rates(coeffs, scn.noise_variance).sum(axis=-1)


def spacing_grid(delta_f_min: float, max_bandwidth: float, grid_per_dfmin: int) -> np.ndarray:
    """Candidate spacings in ``(0, max_bandwidth]``, ascending.

    Contains every multiple of ``delta_f_min``, ``grid_per_dfmin`` uniform
    points per ``delta_f_min`` interval, and ``max_bandwidth`` itself.
    """
    if grid_per_dfmin < 1:
        raise ValueError("grid_per_dfmin must be >= 1")
    # j / g is an exact integer when g divides j, so multiples land exactly
    count = int(np.floor(max_bandwidth / delta_f_min * grid_per_dfmin * (1 + 1e-12)))
    units = np.arange(1, count + 1) / grid_per_dfmin
    units = units[units * delta_f_min <= max_bandwidth * (1 + 1e-12)]
    return np.unique(np.append(units * delta_f_min, max_bandwidth))


def best_spacing(
    scn: Scenario, max_bandwidth: float, grid_per_dfmin: int = DEFAULT_GRID_PER_DFMIN
) -> tuple[float, float]:
    """Best IA-ZF spacing within ``max_bandwidth``; ties go to the smaller spacing."""
    if not max_bandwidth > 0:
        raise ValueError("max_bandwidth must be > 0")
    sa = spacing_analysis(scn)
    if sa.degenerate:
        raise ValueError("best_spacing needs a non-degenerate scenario")
    grid = spacing_grid(sa.delta_f_min, max_bandwidth, grid_per_dfmin)
    rates = ia_zf_sum_rates(scn, grid)
    best = int(np.argmax(rates))
    return float(grid[best]), float(rates[best])


def _distance_to_odd(y):
    r = np.remainder(y - 1.0, 2.0)
    return np.minimum(r, 2.0 - r)


def _cross_delays(scn: Scenario) -> np.ndarray:
    return scn.delays[~np.eye(scn.k, dtype=bool)]


def time_ia_residual(scn: Scenario, delta_f: float) -> float:
    """How far ``delta_f`` is from making equal-ratio (time-slot) alignment exact.

    Max over cross pairs of the distance of ``2 delta_f tau_ik`` to the odd
    integers; zero iff every ``delta_f = (1 + 2 n_ik) / (2 tau_ik)``.
    """
    _require_three(scn)
    if not delta_f > 0:
        raise ValueError("delta_f must be > 0")
    return float(np.max(_distance_to_odd(2.0 * delta_f * _cross_delays(scn))))


def _time_ia_candidates(scn: Scenario, max_delta_f: float):
    taus = _cross_delays(scn)
    sums = (taus[:, None] + taus[None, :])[np.triu_indices(taus.size)]
    pieces = []
    for s in sums:
        f = np.arange(1, int(np.floor(max_delta_f * s)) + 1) / s
        pieces.append(f[f <= max_delta_f])
    f = np.unique(np.concatenate(pieces))
    vals = np.empty_like(f)
    for start in range(0, f.size, 1 << 16):
        block = f[start : start + (1 << 16)]
        vals[start : start + block.size] = _distance_to_odd(2.0 * block[:, None] * taus).max(axis=1)
    return f, vals


def min_time_ia_residual(scn: Scenario, max_delta_f) -> np.ndarray | float:
    """Exact minimum of :func:`time_ia_residual` over ``(0, max_delta_f]``.

    The residual is a maximum of tent functions with slopes ``+-2 tau``.
    Its local minima sit where a rising piece of one tent meets a falling
    piece of another (or the same) tent, i.e. at ``m / (tau_a + tau_b)``
    for a positive integer ``m``. Those points plus the right endpoint are
    enumerated. ``max_delta_f`` may be an array of bandwidths.
    """
    _require_three(scn)
    bounds = np.asarray(max_delta_f, dtype=float)
    if np.any(bounds <= 0):
        raise ValueError("max_delta_f must be > 0")
    f, vals = _time_ia_candidates(scn, float(bounds.max()))
    prefix = np.minimum.accumulate(vals) if vals.size else vals
    out = []
    for bound in bounds.ravel():
        best = time_ia_residual(scn, bound)
        n = int(np.searchsorted(f, bound, side="right"))
        if n:
            best = min(best, float(prefix[n - 1]))
        out.append(best)
    out = np.array(out).reshape(bounds.shape)
    return float(out) if out.ndim == 0 else out
