"""Dictionary construction, scene synthesis and noisy observations ``Y = A X + E``."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import (AngleGrid, ArrayConfig, ConfigurationError, ElementPositions,
                       SeedLike, as_generator, steering_virtual)


@dataclass(frozen=True)
class MeasurementMatrix:
    """The ``MN x G`` dictionary together with the array/grid it was built from."""

    entries: np.ndarray
    normalized: bool
    config: ArrayConfig = None
    positions: ElementPositions = None
    grid: AngleGrid = None

    @property
    def shape(self):
        return self.entries.shape

    @property
    def MN(self) -> int:
        return self.entries.shape[0]

    @property
    def G(self) -> int:
        return self.entries.shape[1]

    def column_norms(self) -> np.ndarray:
        return np.linalg.norm(self.entries, axis=0)

    def as_normalized(self) -> "MeasurementMatrix":
        if self.normalized:
            return self
        return MeasurementMatrix(self.entries / self.column_norms(), True,
                                 self.config, self.positions, self.grid)


def build_matrix(cfg: ArrayConfig, positions: ElementPositions, grid: AngleGrid,
                 normalized: bool = False) -> MeasurementMatrix:
    """Stack virtual steering vectors over the grid.

    Raw columns have squared norm ``MN``; with ``normalized=True`` they are
    scaled by ``1/sqrt(MN)``.
    """
    if positions.M != cfg.M or positions.N != cfg.N:
        raise ConfigurationError(
            f"positions are {positions.M}x{positions.N} but config is {cfg.M}x{cfg.N}")
    A = steering_virtual(positions, cfg.Z, grid.phi)
    if normalized:
        A = A / np.sqrt(cfg.MN)
    return MeasurementMatrix(A, normalized, cfg, positions, grid)


@dataclass(frozen=True)
class Scene:
    """K targets on grid indices ``support`` (zero-based, sorted) with ``K x P`` gains."""

    support: np.ndarray
    gains: np.ndarray
    G: int

    def __post_init__(self):
        support = np.asarray(self.support, dtype=int).reshape(-1)
        gains = np.asarray(self.gains, dtype=complex)
        if gains.ndim == 1:
            gains = gains[:, None]
        if gains.shape[0] != support.size:
            raise ConfigurationError("need one gain row per support index")
        if support.size > self.G:
            raise ConfigurationError(f"K={support.size} exceeds grid size G={self.G}")
        if np.unique(support).size != support.size:
            raise ConfigurationError("support indices must be distinct")
        if support.size and (support.min() < 0 or support.max() >= self.G):
            raise ConfigurationError("support index out of range")
        order = np.argsort(support)
        object.__setattr__(self, "support", support[order])
        object.__setattr__(self, "gains", gains[order])

    @property
    def K(self) -> int:
        return self.support.size

    @property
    def P(self) -> int:
        return self.gains.shape[1]

    @property
    def X(self) -> np.ndarray:
        X = np.zeros((self.G, self.P), dtype=complex)
        X[self.support] = self.gains
        return X


def synthesize_scene(grid, K: int, P: int = 1, seed: SeedLike = None) -> Scene:
    """Draw K distinct target cells and unit-modulus gains ``exp(-j varphi)``.

    Phases are i.i.d. uniform on ``[0, 2 pi)`` and redrawn for every pulse.
    ``grid`` may be an :class:`AngleGrid` or the grid size ``G``.
    """
    G = grid.G if isinstance(grid, AngleGrid) else int(grid)
    if K < 0 or K > G:
        raise ConfigurationError(f"need 0 <= K <= G, got K={K}, G={G}")
    if P < 1:
        raise ConfigurationError(f"need P >= 1, got {P}")
    rng = as_generator(seed)
    support = np.sort(rng.choice(G, size=K, replace=False))
    phases = rng.uniform(0.0, 2 * np.pi, size=(K, P))
    return Scene(support, np.exp(-1j * phases), G)


def sigma_from_snr(snr_db: float) -> float:
    """Noise standard deviation for ``SNR = -10 log10(sigma^2)``."""
    return float(10.0 ** (-snr_db / 20.0))


def snr_from_sigma(sigma: float) -> float:
    return float(-20.0 * np.log10(sigma))


@dataclass(frozen=True)
class SnapshotData:
    Y: np.ndarray
    sigma: float
    snr_db: float


def complex_noise(shape, sigma: float, rng: np.random.Generator) -> np.ndarray:
    """Circular complex Gaussian with variance ``sigma**2`` per entry."""
    scale = sigma / np.sqrt(2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def observe(A, scene: Scene, sigma: float, seed: SeedLike = None) -> SnapshotData:
    entries = A.entries if isinstance(A, MeasurementMatrix) else np.asarray(A)
    if entries.shape[1] != scene.G:
        raise ConfigurationError(f"matrix has {entries.shape[1]} columns, scene has G={scene.G}")
    rng = as_generator(seed)
    Y = entries[:, scene.support] @ scene.gains
    if sigma > 0:
        Y = Y + complex_noise(Y.shape, sigma, rng)
    snr = snr_from_sigma(sigma) if sigma > 0 else float("inf")
    return SnapshotData(Y=Y, sigma=float(sigma), snr_db=snr)


# ---------------------------------------------------------------------------
# Waveform-domain check of the matched-filter model
# ---------------------------------------------------------------------------

def fourier_codes(M: int, normalized: bool = True) -> np.ndarray:
    """Rows of the ``M x M`` DFT matrix, one ``M``-symbol code per transmitter."""
    m = np.arange(M)
    S = np.exp(-2j * np.pi * np.outer(m, m) / M)
    return S / np.sqrt(M) if normalized else S


@dataclass(frozen=True)
class RoundtripReport:
    max_deviation: float
    gram_deviation: float
    W: np.ndarray

    @property
    def orthonormal(self) -> bool:
        return self.gram_deviation <= 1e-12

    @property
    def ok(self) -> bool:
        return self.orthonormal and self.max_deviation <= 1e-10


def waveform_roundtrip_check(positions: ElementPositions, Z, grid: AngleGrid, X,
                             codes=None) -> RoundtripReport:
    """Synthesize coded received samples and matched-filter them back.

    For each pulse the ``N x L`` receive block is
    ``sum_k x_k b(phi_k) c(phi_k)^T S`` (zero delay and Doppler); the matched
    filter multiplies by ``S^H`` and vectorizes column-major, which must equal
    ``(A X)_p`` for the raw dictionary whenever ``S S^H = I``.
    """
    X = np.asarray(X, dtype=complex)
    if X.ndim == 1:
        X = X[:, None]
    M = positions.M
    S = fourier_codes(M) if codes is None else np.asarray(codes, dtype=complex)
    if S.shape[0] != M:
        raise ConfigurationError(f"need {M} codes, got {S.shape[0]}")
    W = S @ S.conj().T
    gram_dev = float(np.max(np.abs(W - np.eye(M))))

    rows = np.flatnonzero(np.any(X != 0, axis=1))
    phi = grid.phi[rows]
    B = np.exp(1j * np.pi * Z * np.outer(positions.zeta, phi))   # N x K
    C = np.exp(1j * np.pi * Z * np.outer(positions.xi, phi))     # M x K
    A = steering_virtual(positions, Z, grid.phi)

    dev = 0.0
    for p in range(X.shape[1]):
        x = X[rows, p]
        received = (B * x) @ C.T @ S               # N x L samples
        y = (received @ S.conj().T).reshape(-1, order="F")
        dev = max(dev, float(np.max(np.abs(y - A @ X[:, p]), initial=0.0)))
    return RoundtripReport(max_deviation=dev, gram_deviation=gram_dev, W=W)
