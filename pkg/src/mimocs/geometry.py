"""Random MIMO array geometry: element distributions, angle grids and steering vectors.

Positions are kept in normalized units: transmitter ``m`` sits at ``Z * xi[m] / 2``
wavelengths and receiver ``n`` at ``Z * zeta[n] / 2``, so that every steering
phase reads ``pi * Z * theta * position`` with ``theta = sin(angle)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

SeedLike = Union[None, int, np.random.Generator, np.random.SeedSequence]

INDEPENDENT = "independent"
TRANSCEIVER = "transceiver"
MODES = (INDEPENDENT, TRANSCEIVER)


class ConfigurationError(ValueError):
    """Raised for invalid array, grid or experiment settings."""


def as_generator(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


# ---------------------------------------------------------------------------
# Element-position distributions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Uniform:
    """Uniform distribution on ``[low, high]``."""

    low: float = -0.5
    high: float = 0.5

    def __post_init__(self):
        if not self.high > self.low:
            raise ConfigurationError(f"uniform needs low < high, got [{self.low}, {self.high}]")

    @property
    def support(self):
        return self.low, self.high

    @property
    def is_even(self) -> bool:
        return self.low == -self.high

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.uniform(self.low, self.high, size)

    def cf(self, u):
        """Characteristic function ``E[exp(j u x)]``."""
        u = np.asarray(u, dtype=float)
        half = 0.5 * (self.high - self.low)
        center = 0.5 * (self.high + self.low)
        # np.sinc(t) = sin(pi t) / (pi t)
        val = np.sinc(u * half / np.pi)
        if center == 0.0:
            return val.astype(complex)
        return np.exp(1j * u * center) * val


@dataclass(frozen=True)
class PointMass:
    """All elements at the same normalized position."""

    value: float = 0.0

    @property
    def support(self):
        return self.value, self.value

    @property
    def is_even(self) -> bool:
        return self.value == 0.0

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return np.full(size, float(self.value))

    def cf(self, u):
        u = np.asarray(u, dtype=float)
        return np.exp(1j * u * self.value)


@dataclass(frozen=True)
class Discrete:
    """Finite distribution over ``values`` with probabilities ``probs`` (uniform if omitted)."""

    values: tuple
    probs: tuple = None

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        if not values:
            raise ConfigurationError("discrete distribution needs at least one value")
        probs = self.probs
        if probs is None:
            probs = tuple(1.0 / len(values) for _ in values)
        probs = tuple(float(p) for p in probs)
        if len(probs) != len(values) or min(probs) < 0 or abs(sum(probs) - 1.0) > 1e-12:
            raise ConfigurationError("discrete probabilities must be non-negative and sum to one")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "probs", probs)

    @property
    def support(self):
        return min(self.values), max(self.values)

    @property
    def is_even(self) -> bool:
        table = dict(zip(self.values, self.probs))
        return all(abs(table.get(-v, 0.0) - p) <= 1e-15 for v, p in table.items())

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.choice(np.asarray(self.values), size=size, p=np.asarray(self.probs))

    def cf(self, u):
        u = np.asarray(u, dtype=float)
        v = np.asarray(self.values)
        p = np.asarray(self.probs)
        return np.exp(1j * np.multiply.outer(u, v)) @ p


Distribution = Union[Uniform, PointMass, Discrete]
_DISTRIBUTIONS = (Uniform, PointMass, Discrete)


def check_distribution(dist) -> None:
    if not isinstance(dist, _DISTRIBUTIONS):
        raise ConfigurationError(f"unsupported position distribution: {dist!r}")


# ---------------------------------------------------------------------------
# Array configuration and positions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ArrayConfig:
    """Random MIMO array description.

    ``Z`` is the total normalized aperture ``Z_tx + Z_rx``. When the apertures
    are omitted they are split evenly, and when the distributions are omitted
    positions are uniform over the full allowed interval
    ``[-Z_tx/Z, Z_tx/Z]`` (resp. ``Z_rx``), which is ``[-1/2, 1/2]`` for the
    even split.
    """

    M: int
    N: int
    Z: float
    Z_tx: float = None
    Z_rx: float = None
    mode: str = INDEPENDENT
    tx_dist: Distribution = None
    rx_dist: Distribution = None

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 1 or int(self.N) != self.N or self.N < 1:
            raise ConfigurationError(f"M and N must be positive integers, got M={self.M}, N={self.N}")
        if not self.Z > 0:
            raise ConfigurationError(f"aperture Z must be positive, got {self.Z}")
        z_tx, z_rx = self.Z_tx, self.Z_rx
        if z_tx is None and z_rx is None:
            z_tx = z_rx = self.Z / 2
        elif z_tx is None:
            z_tx = self.Z - z_rx
        elif z_rx is None:
            z_rx = self.Z - z_tx
        if z_tx < 0 or z_rx < 0 or abs(z_tx + z_rx - self.Z) > 1e-12 * self.Z:
            raise ConfigurationError("need Z_tx >= 0, Z_rx >= 0 and Z_tx + Z_rx = Z")
        object.__setattr__(self, "Z_tx", float(z_tx))
        object.__setattr__(self, "Z_rx", float(z_rx))
        if self.mode not in MODES:
            raise ConfigurationError(f"mode must be one of {MODES}, got {self.mode!r}")

        tx = self.tx_dist if self.tx_dist is not None else _default_dist(self.tx_halfwidth)
        rx = self.rx_dist if self.rx_dist is not None else _default_dist(self.rx_halfwidth)
        check_distribution(tx)
        check_distribution(rx)
        if self.mode == TRANSCEIVER:
            if self.M != self.N:
                raise ConfigurationError("transceiver mode requires M == N")
            if self.tx_dist is None:
                tx = rx
            if tx != rx:
                raise ConfigurationError("transceiver mode requires identical tx/rx distributions")
        _check_within(tx, self.tx_halfwidth, "transmit")
        _check_within(rx, self.rx_halfwidth, "receive")
        object.__setattr__(self, "tx_dist", tx)
        object.__setattr__(self, "rx_dist", rx)

    @property
    def tx_halfwidth(self) -> float:
        return self.Z_tx / self.Z

    @property
    def rx_halfwidth(self) -> float:
        return self.Z_rx / self.Z

    @property
    def MN(self) -> int:
        return self.M * self.N


def _default_dist(halfwidth: float) -> Distribution:
    if halfwidth == 0:
        return PointMass(0.0)
    return Uniform(-halfwidth, halfwidth)


def _check_within(dist, halfwidth, label):
    lo, hi = dist.support
    tol = 1e-12
    if lo < -halfwidth - tol or hi > halfwidth + tol:
        raise ConfigurationError(
            f"{label} distribution support [{lo}, {hi}] exceeds [-{halfwidth}, {halfwidth}]")


@dataclass(frozen=True)
class ElementPositions:
    """One realization of normalized transmit (``xi``) and receive (``zeta``) positions."""

    xi: np.ndarray
    zeta: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "xi", np.atleast_1d(np.asarray(self.xi, dtype=float)))
        object.__setattr__(self, "zeta", np.atleast_1d(np.asarray(self.zeta, dtype=float)))

    @property
    def M(self) -> int:
        return self.xi.size

    @property
    def N(self) -> int:
        return self.zeta.size


def sample_positions(cfg: ArrayConfig, seed: SeedLike = None) -> ElementPositions:
    """Draw i.i.d. element positions for ``cfg``.

    In transceiver mode the receive draw is reused for the transmitters.
    """
    rng = as_generator(seed)
    zeta = cfg.rx_dist.sample(rng, cfg.N)
    if cfg.mode == TRANSCEIVER:
        xi = zeta.copy()
    else:
        xi = cfg.tx_dist.sample(rng, cfg.M)
    return ElementPositions(xi=xi, zeta=zeta)


def nyquist_array(M: int, N: int):
    """Filled virtual ULA: receivers lambda/2 apart, transmitters N*lambda/2 apart.

    Returns ``(cfg, positions, grid)`` where the grid has ``G = MN`` points
    spaced ``2/MN`` so that the dictionary columns are mutually orthogonal.
    """
    Z = (M * N - 1) / 2
    if Z == 0:
        raise ConfigurationError("a Nyquist array needs MN >= 2")
    zeta = (np.arange(N) - (N - 1) / 2) / Z
    xi = (np.arange(M) - (M - 1) / 2) * N / Z
    z_rx = (N - 1) / 2
    z_tx = Z - z_rx
    cfg = ArrayConfig(M=M, N=N, Z=Z, Z_tx=z_tx, Z_rx=z_rx,
                      tx_dist=Discrete(tuple(xi)) if z_tx > 0 else PointMass(0.0),
                      rx_dist=Discrete(tuple(zeta)) if z_rx > 0 else PointMass(0.0))
    G = M * N
    grid = AngleGrid(-1.0 + 2.0 * np.arange(G) / G, Z=Z)
    return cfg, ElementPositions(xi=xi, zeta=zeta), grid


# ---------------------------------------------------------------------------
# Angle grids
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AngleGrid:
    """Candidate directions ``phi`` in the sine domain ``[-1, 1]``."""

    phi: np.ndarray
    Z: float
    spacing: float = field(default=None)

    def __post_init__(self):
        phi = np.asarray(self.phi, dtype=float)
        if phi.ndim != 1 or phi.size < 2:
            raise ConfigurationError("an angle grid needs at least two points")
        if np.any(np.diff(phi) <= 0):
            raise ConfigurationError("grid points must be strictly increasing")
        if phi[0] < -1 - 1e-12 or phi[-1] > 1 + 1e-12:
            raise ConfigurationError("grid points must lie in [-1, 1]")
        object.__setattr__(self, "phi", phi)
        if self.spacing is None:
            d = np.diff(phi)
            spacing = float(d[0]) if np.allclose(d, d[0], rtol=1e-10, atol=0) else float("nan")
            object.__setattr__(self, "spacing", spacing)

    @property
    def G(self) -> int:
        return self.phi.size

    @property
    def is_uniform(self) -> bool:
        return not np.isnan(self.spacing)

    def u_first_row(self) -> np.ndarray:
        """``u_{1,i} = pi Z (phi_i - phi_1)`` for every grid index."""
        return np.pi * self.Z * (self.phi - self.phi[0])


def canonical_grid(Z) -> AngleGrid:
    """``Z + 1`` points spaced ``2/Z`` over ``[-1, 1]`` (the zeros of the uniform sinc)."""
    if isinstance(Z, bool) or int(Z) != Z or Z < 1:
        raise ConfigurationError(f"canonical grid needs a positive integer Z, got {Z!r}")
    Z = int(Z)
    phi = -1.0 + 2.0 * np.arange(Z + 1) / Z
    return AngleGrid(phi, Z=Z, spacing=2.0 / Z)


# ---------------------------------------------------------------------------
# Steering vectors
# ---------------------------------------------------------------------------

def _steer(pos, Z, theta):
    theta = np.asarray(theta, dtype=float)
    phase = np.pi * Z * np.multiply.outer(pos, theta)
    return np.exp(1j * phase)


def steering_rx(positions: ElementPositions, Z, theta) -> np.ndarray:
    """Receive steering vector ``b(theta)``; shape ``(N,)`` or ``(N, T)`` for array theta."""
    return _steer(positions.zeta, Z, theta)


def steering_tx(positions: ElementPositions, Z, theta) -> np.ndarray:
    """Transmit steering vector ``c(theta)``; shape ``(M,)`` or ``(M, T)``."""
    return _steer(positions.xi, Z, theta)


def steering_virtual(positions: ElementPositions, Z, theta) -> np.ndarray:
    """Virtual steering vector ``c(theta) kron b(theta)``.

    Entry ``N*m + n`` (zero-based) holds ``exp(j pi Z theta (xi_m + zeta_n))``.
    """
    c = steering_tx(positions, Z, theta)
    b = steering_rx(positions, Z, theta)
    out = c[:, None, ...] * b[None, :, ...]
    return out.reshape((positions.M * positions.N,) + out.shape[2:])
