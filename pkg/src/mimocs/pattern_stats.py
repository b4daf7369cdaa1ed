"""Random array pattern, Gram matrix and coherence statistics."""
from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .geometry import (INDEPENDENT, TRANSCEIVER, AngleGrid, ConfigurationError,
                       ElementPositions, check_distribution)
from .model import MeasurementMatrix


def factor_patterns(positions: ElementPositions, u):
    """Transmit and receive patterns ``(beta_xi(u), beta_zeta(u))``."""
    u = np.asarray(u, dtype=float)
    bx = np.exp(1j * np.multiply.outer(u, positions.xi)).mean(axis=-1)
    bz = np.exp(1j * np.multiply.outer(u, positions.zeta)).mean(axis=-1)
    return bx, bz


def array_pattern(positions: ElementPositions, u):
    """Normalized virtual-array pattern ``(1/MN) sum_m sum_n exp(j u (xi_m + zeta_n))``.

    Evaluated through the transmit/receive factorization, which is exact.
    """
    bx, bz = factor_patterns(positions, u)
    return bx * bz


@dataclass(frozen=True)
class PatternStats:
    u: np.ndarray
    mean: np.ndarray
    var_re: np.ndarray
    var_im: np.ndarray
    cov: np.ndarray


def analytic_stats(tx_dist, rx_dist, M: int, N: int, u) -> PatternStats:
    """Mean and real/imaginary variances of the random pattern at ``u``.

    The mean is the characteristic function of ``xi + zeta``. Variances are
    only available for identically distributed, even transmit and receive
    positions, where

    ``var_re = (1 + psi_z(2u)) / 2MN + psi_z(u) [(M+N-2)(1 + psi_xi(2u)) / 2MN - psi_z(u)(M+N-1)/MN]``
    ``var_im = (1 - psi_z(2u)) / 2MN + psi_z(u) (M+N-2)(1 - psi_xi(2u)) / 2MN``

    and the real/imaginary covariance vanishes.
    """
    check_distribution(tx_dist)
    check_distribution(rx_dist)
    if tx_dist != rx_dist:
        raise ConfigurationError("variance formulas need identically distributed tx/rx positions")
    if not tx_dist.is_even:
        raise ConfigurationError("variance formulas need an even position distribution")
    u = np.asarray(u, dtype=float)
    psi = tx_dist.cf(u).real
    psi2 = tx_dist.cf(2 * u).real
    psi_z = psi * psi
    psi_z2 = psi2 * psi2
    MN = M * N
    var_re = (1 + psi_z2) / (2 * MN) + psi_z * (
        (M + N - 2) / (2 * MN) * (1 + psi2) - psi_z * (M + N - 1) / MN)
    var_im = (1 - psi_z2) / (2 * MN) + psi_z * (M + N - 2) / (2 * MN) * (1 - psi2)
    # clip round-off below zero at the mainlobe
    var_re = np.maximum(var_re, 0.0)
    var_im = np.maximum(var_im, 0.0)
    return PatternStats(u=u, mean=psi_z.astype(complex), var_re=var_re, var_im=var_im,
                        cov=np.zeros_like(u))


def mean_pattern(tx_dist, rx_dist, u, mode: str = INDEPENDENT):
    """Characteristic function of ``z = xi + zeta`` (``psi_zeta(2u)`` for transceivers)."""
    if mode == TRANSCEIVER:
        return rx_dist.cf(2 * np.asarray(u, dtype=float))
    return tx_dist.cf(u) * rx_dist.cf(u)


def _entries(A):
    return A.entries if isinstance(A, MeasurementMatrix) else np.asarray(A)


def gram(A) -> np.ndarray:
    a = _entries(A)
    return a.conj().T @ a


def toeplitz_spread(Q) -> float:
    """Largest deviation of any entry from the first entry of its diagonal."""
    Q = np.asarray(Q)
    G = Q.shape[0]
    spread = 0.0
    for k in range(-(G - 1), G):
        d = np.diagonal(Q, offset=k)
        spread = max(spread, float(np.max(np.abs(d - d[0]))))
    return spread


@dataclass(frozen=True)
class CoherenceSample:
    mu: float
    offdiag: np.ndarray


def coherence(A, uniform_grid: bool = None) -> CoherenceSample:
    """Peak normalized off-diagonal Gram entry.

    On uniform grids the Gram matrix is Toeplitz, so only ``a_1^H a_i`` is
    formed. ``uniform_grid`` defaults to the grid recorded on a
    :class:`MeasurementMatrix` and to ``False`` for bare arrays.
    """
    a = _entries(A)
    if a.shape[1] < 2:
        raise ConfigurationError("coherence needs at least two columns")
    if uniform_grid is None:
        grid = getattr(A, "grid", None)
        uniform_grid = bool(grid is not None and grid.is_uniform)
    norms = np.linalg.norm(a, axis=0)
    first = (a[:, 0].conj() @ a[:, 1:]) / (norms[0] * norms[1:])
    if uniform_grid:
        mu = float(np.max(np.abs(first)))
    else:
        an = a / norms
        Q = np.abs(an.conj().T @ an)
        np.fill_diagonal(Q, 0.0)
        mu = float(Q.max())
    return CoherenceSample(mu=min(mu, 1.0), offdiag=first)


def coherence_from_positions(positions: ElementPositions, grid: AngleGrid) -> float:
    """Coherence on a uniform grid via the pattern factorization, ``O((M+N) G)``."""
    if not grid.is_uniform:
        raise ConfigurationError("the Toeplitz shortcut needs a uniform grid")
    u = grid.u_first_row()[1:]
    return float(np.max(np.abs(array_pattern(positions, u))))


def empirical_ccdf(samples, q_grid) -> np.ndarray:
    """Fraction of samples strictly above each ``q``."""
    s = np.sort(np.asarray(samples, dtype=float).ravel())
    if s.size == 0:
        raise ValueError("empirical_ccdf needs at least one sample")
    q = np.asarray(q_grid, dtype=float)
    return 1.0 - np.searchsorted(s, q, side="right") / s.size


def sidelobe_phase_samples(A) -> np.ndarray:
    """Phases of ``a_1^H a_i`` for ``i = 2..G``, wrapped to ``[0, 2 pi)``."""
    a = _entries(A)
    inner = a[:, 0].conj() @ a[:, 1:]
    return np.mod(np.angle(inner), 2 * np.pi)


def phase_uniformity_test(phases, bins: int = 20, alpha: float = 0.01):
    """Chi-square test of uniform phase over equiprobable bins.

    Returns ``(statistic, p_value, passed)``.
    """
    counts, _ = np.histogram(np.mod(phases, 2 * np.pi), bins=bins, range=(0.0, 2 * np.pi))
    stat, p = stats.chisquare(counts)
    return float(stat), float(p), bool(p >= alpha)


CCDF_HEADER = ("q", "ccdf_empirical", "ccdf_bound", "MN", "mode")


def write_ccdf_csv(path, rows) -> None:
    """Write ``(q, ccdf_empirical, ccdf_bound, MN, mode)`` rows."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CCDF_HEADER)
        for q, emp, bound, mn, mode in rows:
            w.writerow([f"{q:.6g}", f"{emp:.6g}", f"{bound:.6g}", int(mn), mode])
