"""
Zero-forcing interference alignment over two subcarriers, single stream per pair.

With one stream, precoder ``v_k`` and receive filter ``u_i`` are complex
2-vectors and interference from transmitter ``k`` vanishes at receiver ``i``
iff ``u_i^H H_{i,k} v_k = 0``. Since every ``H_{i,k}`` is diagonal with
nonzero entries, taking logarithms turns each such condition into a linear
equation

    ln(u_i2* / u_i1*) + ln(v_k2 / v_k1) = j pi (1 + 2 n) - ln(h_ik2 / h_ik1)

in the unknown log-ratios ``x = (x_u1..x_uK, x_v1..x_vK)``. Stacking all
``K (K-1)`` cross pairs gives ``A x = b`` with a 0/1 incidence matrix ``A``
of rank ``2K - 1``. Alignment is feasible iff ``b`` lies in the range of
``A`` modulo the free branch integers ``n``.

The array helpers prefixed with an underscore accept arbitrary leading batch
dimensions so that spacing sweeps can be evaluated in one shot.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from .baselines import RateReport, Scheme
from .channel import ChannelSet
from .exceptions import Theorem1IsThreeUser, UnsupportedK

DEFAULT_TOL = 1e-9


# -- structure of A (depends on K only) ----------------------------------------


@functools.lru_cache(maxsize=None)
def _row_map(k: int) -> tuple[tuple[int, int], ...]:
    return tuple((i, j) for i in range(k) for j in range(k) if i != j)


@functools.lru_cache(maxsize=None)
def _incidence(k: int) -> np.ndarray:
    rows = _row_map(k)
    a = np.zeros((len(rows), 2 * k), dtype=np.int64)
    for r, (i, j) in enumerate(rows):
        a[r, i] = 1
        a[r, k + j] = 1
    a.flags.writeable = False
    return a


@functools.lru_cache(maxsize=None)
def _pinv(k: int) -> np.ndarray:
    p = np.linalg.pinv(_incidence(k).astype(float))
    p.flags.writeable = False
    return p


def echelon_with_transform(a: np.ndarray):
    """Exact integer Gaussian elimination of ``a``.

    Pivots are taken as the first row (from the current one down) with a
    nonzero entry in the pivot column. Returns ``(echelon, transform,
    rank)`` with ``transform @ a == echelon``; rows ``rank:`` of
    ``echelon`` are zero and the matching rows of ``transform`` hold the
    left null space combinations.
    """
    m = np.array(a, dtype=object)
    n_rows, n_cols = m.shape
    t = np.array(np.eye(n_rows, dtype=np.int64), dtype=object)
    piv_r = 0
    for piv_c in range(n_cols):
        if piv_r == n_rows:
            break
        candidates = [r for r in range(piv_r, n_rows) if m[r, piv_c] != 0]
        if not candidates:
            continue
        r = candidates[0]
        if r != piv_r:
            m[[piv_r, r]] = m[[r, piv_r]]
            t[[piv_r, r]] = t[[r, piv_r]]
        pivot = m[piv_r, piv_c]
        for r in range(piv_r + 1, n_rows):
            factor = m[r, piv_c]
            if factor == 0:
                continue
            if factor % pivot:
                raise ArithmeticError("non-unimodular pivot; elimination left the integers")
            factor //= pivot
            m[r] = m[r] - factor * m[piv_r]
            t[r] = t[r] - factor * t[piv_r]
        piv_r += 1
    return m.astype(np.int64), t.astype(np.int64), piv_r


@functools.lru_cache(maxsize=None)
def _elimination(k: int):
    _, transform, rank = echelon_with_transform(_incidence(k))
    weights = transform[rank:]
    # transform is unimodular, so its inverse is an integer matrix; its last
    # columns map a wanted shift of the residual combinations back to
    # per-row branch integers
    inverse = np.rint(np.linalg.inv(transform.astype(float))).astype(np.int64)
    if not np.array_equal(inverse @ transform, np.eye(transform.shape[0], dtype=np.int64)):
        raise ArithmeticError("elimination transform is not unimodular")
    lift = inverse[:, rank:]
    weights.flags.writeable = False
    lift.flags.writeable = False
    return weights, lift


def _residual_weights(k: int) -> np.ndarray:
    return _elimination(k)[0]


# -- batch kernels -----------------------------------------------------------------


def _rhs(coeffs: np.ndarray) -> np.ndarray:
    """Right-hand side ``b`` at principal branch; shape ``(..., K(K-1))``."""
    k = coeffs.shape[-2]
    rows = np.array(_row_map(k))
    cross = coeffs[..., rows[:, 0], rows[:, 1], :]
    h1, h2 = cross[..., 0], cross[..., 1]
    real = -np.log(np.abs(h2) / np.abs(h1))
    imag = _wrap(np.pi - (np.angle(h2) - np.angle(h1)))
    return real + 1j * imag


def _wrap(theta):
    """Map angles to (-pi, pi]."""
    return np.pi - np.remainder(np.pi - theta, 2.0 * np.pi)


def _angular_distance(theta, target):
    return np.abs(np.remainder(theta - target + np.pi, 2.0 * np.pi) - np.pi)


def _select_branches(b: np.ndarray, k: int) -> np.ndarray:
    """Shift entries of ``b`` by multiples of ``2 pi j`` toward consistency.

    Each residual combination ``alpha @ b`` is moved to within ``pi`` of its
    admissible target, so a system that is feasible modulo 2 pi becomes
    exactly consistent.
    """
    weights, lift = _elimination(k)
    combo = b.imag @ weights.T
    turns = np.rint((combo - np.pi * weights.sum(axis=1)) / (2.0 * np.pi))
    return b - 2j * np.pi * (turns @ lift.T)


def _solve(b: np.ndarray, k: int) -> np.ndarray:
    return _select_branches(b, k) @ _pinv(k).T


def _filters(x: np.ndarray, k: int):
    ones = np.ones(x.shape[:-1] + (k,))
    u = np.stack([ones, np.conj(np.exp(x[..., :k]))], axis=-1)
    v = np.stack([ones, np.exp(x[..., k:])], axis=-1)
    u /= np.linalg.norm(u, axis=-1, keepdims=True)
    v /= np.linalg.norm(v, axis=-1, keepdims=True)
    return u, v


def _gains(coeffs: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """``g[..., i, k] = u_i^H H_{i,k} v_k``."""
    return np.einsum("...il,...ikl,...kl->...ik", np.conj(u), coeffs, v)


def _split_gains(g: np.ndarray):
    k = g.shape[-1]
    eye = np.eye(k, dtype=bool)
    effective = np.diagonal(g, axis1=-2, axis2=-1)
    leak = np.where(eye, 0.0, np.abs(g) ** 2).sum(axis=-1)
    return effective, leak


def _rates(effective, leak, noise_variance):
    return np.log2(1.0 + np.abs(effective) ** 2 / (noise_variance + leak))


def _ia_zf_rates(coeffs: np.ndarray, noise_variance: float) -> np.ndarray:
    """Per-pair IA-ZF rates for a batch of channel sets, shape ``(..., K)``."""
    k = coeffs.shape[-2]
    u, v = _filters(_solve(_rhs(coeffs), k), k)
    effective, leak = _split_gains(_gains(coeffs, u, v))
    return _rates(effective, leak, noise_variance)


# -- public types --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class AlignmentSystem:
    """The linear system ``A x = b`` for one channel set.

    ``row_map[r] = (i, k)`` names the cross pair of row ``r`` (zero-based,
    lexicographic). ``b`` is stored at the principal branch.
    """

    k: int
    A: np.ndarray = field(repr=False)
    b: np.ndarray = field(repr=False)
    row_map: tuple[tuple[int, int], ...] = field(repr=False)

    def with_rhs(self, b) -> AlignmentSystem:
        return AlignmentSystem(self.k, self.A, np.asarray(b, dtype=complex), self.row_map)


@dataclass(frozen=True)
class FeasibilityReport:
    amplitude_residuals: tuple[float, ...]
    phase_residuals: tuple[float, ...]
    feasible: bool
    tolerance_used: tuple[float, float]

    def to_dict(self) -> dict:
        return {
            "amplitude_residuals": list(self.amplitude_residuals),
            "phase_residuals": list(self.phase_residuals),
            "feasible": self.feasible,
            "tolerance_used": {"amplitude": self.tolerance_used[0], "phase": self.tolerance_used[1]},
        }


@dataclass(frozen=True, eq=False)
class BeamformerSet:
    """Unit-norm precoders ``v`` and receive filters ``u``, both ``(K, 2)``."""

    v: np.ndarray
    u: np.ndarray

    @property
    def k(self) -> int:
        return self.v.shape[0]


# -- operations ----------------------------------------------------------------


def build_system(ch: ChannelSet) -> AlignmentSystem:
    """Stack the log-domain zero-forcing conditions of all cross pairs."""
    k = ch.k
    if k < 3:
        raise UnsupportedK(f"the alignment system needs K >= 3 user pairs, got {k}")
    return AlignmentSystem(k, _incidence(k), _rhs(ch.coefficients), _row_map(k))


def residual_weights(k: int) -> np.ndarray:
    """Integer row combinations annihilating ``A``; shape ``(K^2-3K+1, K(K-1))``."""
    if k < 3:
        raise UnsupportedK(f"the alignment system needs K >= 3 user pairs, got {k}")
    return _residual_weights(k)


def feasibility(
    sys: AlignmentSystem, tol_amp: float = DEFAULT_TOL, tol_phase: float = DEFAULT_TOL
) -> FeasibilityReport:
    """Check whether ``b`` is in the range of ``A`` up to branch integers.

    Every zero row of the echelon form of ``A`` gives one condition
    ``sum_r alpha_r b_r = 0``. Its real part must vanish; its imaginary part
    only has to hit ``pi * sum(alpha) + 2 pi m`` for some integer ``m``,
    which absorbs every admissible choice of branch integers.
    """
    weights = residual_weights(sys.k)
    combo = weights @ sys.b
    amp = np.abs(combo.real)
    phase = _angular_distance(combo.imag, np.pi * weights.sum(axis=1))
    feasible = bool(np.all(amp <= tol_amp) and np.all(phase <= tol_phase))
    return FeasibilityReport(
        tuple(float(a) for a in amp),
        tuple(float(p) for p in phase),
        feasible,
        (float(tol_amp), float(tol_phase)),
    )


_PRODUCT_SIGNS = {(0, 1): 1, (0, 2): -1, (1, 2): 1, (1, 0): -1, (2, 0): 1, (2, 1): -1}


def theorem1_residual(ch: ChannelSet) -> tuple[float, float]:
    """Residuals of the closed-form three-user condition.

    The product of the six cross-channel subcarrier ratios (alternately
    inverted) must equal one. Returns ``|ln|product||`` and the angular
    distance of its phase to the nearest multiple of 2 pi.
    """
    if ch.k != 3:
        raise Theorem1IsThreeUser(f"closed-form condition is for K = 3, got {ch.k}")
    log_amp = 0.0
    phase = 0.0
    for (i, k), sign in _PRODUCT_SIGNS.items():
        h1, h2 = ch.coefficients[i, k]
        log_amp += sign * np.log(abs(h2) / abs(h1))
        phase += sign * (np.angle(h2) - np.angle(h1))
    return float(abs(log_amp)), float(_angular_distance(phase, 0.0))


def aligned_rhs(sys: AlignmentSystem) -> np.ndarray:
    """``b`` with branch integers chosen to make the system as consistent as possible.

    Differs from ``sys.b`` only by integer multiples of ``2 pi j``.
    """
    return _select_branches(sys.b, sys.k)


def least_squares(sys: AlignmentSystem) -> np.ndarray:
    """Minimum-norm least-squares solution of ``A x = aligned_rhs(sys)``."""
    return _solve(sys.b, sys.k)


def solve_beamformers(sys: AlignmentSystem) -> BeamformerSet:
    """Zero-forcing filters from the minimum-norm solution of ``A x = b``.

    Branch integers are picked first (see :func:`aligned_rhs`), so any
    system that is feasible modulo 2 pi is solved exactly.

    Each filter is ``(1, ratio)`` scaled to unit norm. For line-of-sight
    channels all ratios have unit modulus, so every entry has magnitude
    ``1/sqrt(2)``. If the system is inconsistent the least-squares
    solution is used and some leakage remains.
    """
    u, v = _filters(least_squares(sys), sys.k)
    return BeamformerSet(v=v, u=u)


def cross_gains(ch: ChannelSet, bf: BeamformerSet) -> np.ndarray:
    """Matrix of ``u_i^H H_{i,k} v_k`` for all ``i, k``."""
    return _gains(ch.coefficients, bf.u, bf.v)


def leakage(ch: ChannelSet, bf: BeamformerSet) -> np.ndarray:
    """Interference power left at each receiver (unit symbol power)."""
    return _split_gains(cross_gains(ch, bf))[1]


def max_normalized_leakage(ch: ChannelSet, bf: BeamformerSet) -> float:
    """``max_{i != k} |u_i^H H_{i,k} v_k| / |h_{i,k}^(1)|``."""
    g = np.abs(cross_gains(ch, bf)) / np.abs(ch.coefficients[..., 0])
    return float(np.max(g[~np.eye(ch.k, dtype=bool)]))


def effective_channels(ch: ChannelSet, bf: BeamformerSet) -> np.ndarray:
    """Scalar gains ``u_i^H H_{i,i} v_i`` seen by the desired streams."""
    return np.diagonal(cross_gains(ch, bf)).copy()


def ia_sum_rate(effective, leak, noise_variance: float) -> RateReport:
    """Single-stream IA rates, ``log2(1 + |h_eff|^2 / (sigma^2 + leak))`` per pair."""
    leak = np.asarray(leak, dtype=float)
    if not noise_variance > 0:
        raise ValueError("noise_variance must be > 0")
    if np.any(leak < 0):
        raise ValueError("leakage must be non-negative")
    return RateReport(Scheme.IA_ZF, _rates(np.asarray(effective), leak, noise_variance))
