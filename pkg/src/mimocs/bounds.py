"""Recovery-guarantee bounds: sidelobe/coherence ccdf, element counts and zero-mean conditions."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .geometry import INDEPENDENT, MODES, TRANSCEIVER, AngleGrid, ConfigurationError, check_distribution

#: Constant of the coherence-based element count, ``(43 + 12 sqrt 7) / 16``.
UNIFORM_RECOVERY_C = (43.0 + 12.0 * math.sqrt(7.0)) / 16.0

#: Restricted-isometry threshold ``2 / (3 + sqrt(7/4))`` behind that constant.
RIP_ALPHA = 2.0 / (3.0 + math.sqrt(7.0 / 4.0))

#: Absolute tolerance for treating a characteristic function value as zero.
CF_ZERO_TOL = 1e-12


class DomainError(ValueError):
    """Argument outside the domain where a bound or special function is defined."""


# ---------------------------------------------------------------------------
# Special functions
# ---------------------------------------------------------------------------

def bessel_k1(x):
    """Modified Bessel function of the second kind, order one, for ``x > 0``."""
    arr = np.asarray(x, dtype=float)
    if np.any(~(arr > 0)):
        raise DomainError("bessel_k1 is defined for x > 0 only")
    out = special.k1(arr)
    return float(out) if np.ndim(x) == 0 else out


def _xk1(x):
    """``x K_1(x)`` extended by its limit 1 at ``x = 0``."""
    x = np.asarray(x, dtype=float)
    out = np.ones_like(x)
    pos = x > 0
    out[pos] = x[pos] * special.k1(x[pos])
    return out


_BRANCH = -1.0 / math.e


def lambert_w_minus1(y: float, tol: float = 1e-15, max_iter: int = 100) -> float:
    """Lower real branch ``w <= -1`` of ``w exp(w) = y`` for ``-1/e <= y < 0``.

    Newton iterations on ``w + log(-w) = log(-y)``, seeded by the branch-point
    series near ``-1/e`` and by the two-term asymptotic expansion near zero,
    and kept below ``-1``.
    """
    y = float(y)
    if y == _BRANCH or (y < _BRANCH and y > _BRANCH - 1e-16):
        return -1.0
    if not (_BRANCH < y < 0.0):
        raise DomainError(f"W_-1 needs -1/e <= y < 0, got {y}")
    if y < -0.25:
        p = -math.sqrt(2.0 * (1.0 + math.e * y))
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p ** 3
    else:
        l1 = math.log(-y)
        l2 = math.log(-l1)
        w = l1 - l2 + l2 / l1
    w = min(w, -1.0 - 1e-12)
    target = math.log(-y)
    for _ in range(max_iter):
        g = w + math.log(-w) - target
        step = g / (1.0 + 1.0 / w)
        w_new = w - step
        if w_new >= -1.0:
            w_new = 0.5 * (w - 1.0)
        if abs(w_new - w) <= tol * abs(w_new):
            w = w_new
            break
        w = w_new
    return w


def lambert_w_minus1_asymptotic(gamma: float) -> float:
    """``W_-1(-gamma^-2) ~ -2 ln gamma - ln(2 ln gamma)`` for large ``gamma``."""
    lg = math.log(gamma)
    return -2.0 * lg - math.log(2.0 * lg)


# ---------------------------------------------------------------------------
# Sidelobe and coherence ccdf bounds
# ---------------------------------------------------------------------------

def coherence_ccdf_bound(q, M: int, N: int, G: int = None, mode: str = INDEPENDENT,
                         per_pair: bool = False):
    """Upper bound on ``Pr(mu > q)`` (or on one sidelobe when ``per_pair``).

    Independent arrays use ``x K_1(x)`` with ``x = 2 sqrt(MN) q``; transceiver
    arrays use ``exp(-N q)``. The coherence form is ``1 - (1 - p)^(G-1)`` for
    the per-sidelobe bound ``p``. Values are clamped to ``[0, 1]``.
    """
    if mode not in MODES:
        raise ConfigurationError(f"unknown mode {mode!r}")
    q_arr = np.asarray(q, dtype=float)
    if mode == TRANSCEIVER:
        if M != N:
            raise ConfigurationError("transceiver mode needs M == N")
        p = np.exp(-N * np.maximum(q_arr, 0.0))
    else:
        p = _xk1(2.0 * math.sqrt(M * N) * np.maximum(q_arr, 0.0))
    p = np.clip(p, 0.0, 1.0)
    if not per_pair:
        if G is None or G < 2:
            raise ConfigurationError("the coherence bound needs the grid size G >= 2")
        # 1 - (1-p)^(G-1) without cancellation for small p
        p = -np.expm1((G - 1) * np.log1p(-np.minimum(p, 1.0 - 1e-300)))
        p = np.where(np.asarray(q_arr) <= 0, 1.0, p)
        p = np.clip(p, 0.0, 1.0)
    return float(p) if np.ndim(q) == 0 else p


# ---------------------------------------------------------------------------
# Element-count requirements
# ---------------------------------------------------------------------------

def _check_query(K, G, epsilon):
    if K < 1 or G <= K:
        raise DomainError(f"need K >= 1 and G > K, got K={K}, G={G}")
    if not 0 < epsilon < 1:
        raise DomainError(f"need 0 < epsilon < 1, got {epsilon}")


def uniform_recovery_mn(K: int, G: int, epsilon: float) -> float:
    """Coherence-based count ``C (K - 1/2)^2 [ln g + ln(2 ln g)/2]^2``, ``g = sqrt(pi) G / (2 eps)``."""
    _check_query(K, G, epsilon)
    gamma = math.sqrt(math.pi) * G / (2.0 * epsilon)
    if gamma <= math.e:
        raise DomainError(f"gamma = {gamma:.4g} <= e; the bound is meaningless here")
    lg = math.log(gamma)
    return UNIFORM_RECOVERY_C * (K - 0.5) ** 2 * (lg + 0.5 * math.log(2.0 * lg)) ** 2


def nonuniform_recovery_mn(K: int, G: int, epsilon: float, C_const: float = 1.0,
                           c_const: float = 1.0) -> float:
    """Isotropy-based count ``C K log^2(c G / eps)``.

    The constants are not calibrated; only the ``K log^2 G`` scaling is
    meaningful, which is why both default to one.
    """
    if C_const <= 0 or c_const <= 0:
        raise DomainError("the constants must be positive")
    if K < 1 or G < 1 or epsilon <= 0:
        raise DomainError("need K >= 1, G >= 1 and epsilon > 0")
    return C_const * K * math.log(c_const * G / epsilon) ** 2


# ---------------------------------------------------------------------------
# Zero-mean conditions on the characteristic functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Verdict:
    """Outcome of a characteristic-function check.

    ``i`` is the one-based grid index of the first violation and ``value`` the
    offending characteristic-function value; both are ``None`` when it holds.
    """

    holds: bool
    i: int = None
    value: complex = None

    def __str__(self):
        return "holds" if self.holds else f"fails@i={self.i}"


def _first_violation(values):
    bad = np.flatnonzero(np.abs(values) > CF_ZERO_TOL)
    if bad.size == 0:
        return Verdict(True)
    k = int(bad[0])
    return Verdict(False, i=k + 2, value=complex(values[k]))


def _u_offsets(grid: AngleGrid, Z):
    Z = grid.Z if Z is None else Z
    return np.pi * Z * (grid.phi[1:] - grid.phi[0])


def isotropy_check(tx_dist, rx_dist, grid: AngleGrid, Z=None, mode: str = INDEPENDENT) -> Verdict:
    """Rows of ``A`` are isotropic iff ``psi_z(u_{1,i}) = 0`` for ``i = 2..G``."""
    check_distribution(tx_dist)
    check_distribution(rx_dist)
    u = _u_offsets(grid, Z)
    if mode == TRANSCEIVER:
        psi_z = rx_dist.cf(2 * u)
    else:
        psi_z = tx_dist.cf(u) * rx_dist.cf(u)
    return _first_violation(psi_z)


def uniform_condition_check(tx_dist, rx_dist, grid: AngleGrid, Z=None) -> Verdict:
    """All of ``psi_xi(u), psi_xi(2u), psi_zeta(u), psi_zeta(2u)`` vanish on the grid offsets."""
    check_distribution(tx_dist)
    check_distribution(rx_dist)
    u = _u_offsets(grid, Z)
    stacked = np.stack([tx_dist.cf(u), tx_dist.cf(2 * u), rx_dist.cf(u), rx_dist.cf(2 * u)])
    worst = stacked[np.argmax(np.abs(stacked), axis=0), np.arange(u.size)]
    return _first_violation(worst)


def report(K: int, G: int, epsilon: float, C_const: float = 1.0, c_const: float = 1.0) -> str:
    """Key-value text block with both element-count requirements."""
    lines = [
        f"K={K}",
        f"G={G}",
        f"epsilon={epsilon:g}",
        f"C_uniform={UNIFORM_RECOVERY_C:.10g}",
    ]
    try:
        lines.append(f"mn_bound_uniform={uniform_recovery_mn(K, G, epsilon):.6g}")
    except DomainError as exc:
        lines.append(f"mn_bound_uniform=undefined ({exc})")
    lines.append(f"mn_bound_nonuniform={nonuniform_recovery_mn(K, G, epsilon, C_const, c_const):.6g}")
    lines.append(f"nonuniform_constants=C:{C_const:g},c:{c_const:g}")
    return "\n".join(lines)
