from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..geometry import ConfigurationError
from ..model import MeasurementMatrix, SnapshotData

#: Ridge added to the normal equations when a selected submatrix is rank deficient.
RIDGE = 1e-12


class RecoveryError(RuntimeError):
    """A solver could not produce an estimate (divergence, guard exceeded, ...)."""


@dataclass
class RecoveryProblem:
    """Sparse recovery instance ``Y = A X + E`` with known sparsity ``K``.

    Columns of ``A`` are normalized on construction; ``col_scale`` keeps the
    original norms so estimates can be reported in the caller's units.
    """

    A: np.ndarray
    Y: np.ndarray
    K: int
    sigma: float = 0.0
    col_scale: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        A = self.A.entries if isinstance(self.A, MeasurementMatrix) else np.asarray(self.A)
        Y = self.Y.Y if isinstance(self.Y, SnapshotData) else np.asarray(self.Y)
        A = A.astype(complex)
        Y = Y.astype(complex)
        if Y.ndim == 1:
            Y = Y[:, None]
        if A.ndim != 2 or Y.shape[0] != A.shape[0]:
            raise ConfigurationError(f"A is {A.shape} but Y has {Y.shape[0]} rows")
        if not 1 <= self.K <= A.shape[1]:
            raise ConfigurationError(f"need 1 <= K <= G, got K={self.K}")
        if self.sigma < 0:
            raise ConfigurationError("sigma must be non-negative")
        norms = np.linalg.norm(A, axis=0)
        if np.any(norms == 0):
            raise ConfigurationError("A has an all-zero column")
        self.col_scale = norms
        self.A = A / norms
        self.Y = Y

    @property
    def MN(self) -> int:
        return self.A.shape[0]

    @property
    def G(self) -> int:
        return self.A.shape[1]

    @property
    def P(self) -> int:
        return self.Y.shape[1]


@dataclass
class RecoveryResult:
    support: np.ndarray
    xhat: np.ndarray
    residual_norm: float
    iterations: int
    method: str
    converged: bool = True
    info: dict = field(default_factory=dict)


def row_norms(X) -> np.ndarray:
    return np.sqrt(np.sum(np.abs(X) ** 2, axis=1))


def top_k(scores, k: int) -> np.ndarray:
    """Indices of the ``k`` largest scores; ties go to the lowest index."""
    return np.argsort(-np.asarray(scores), kind="stable")[:k]


def least_squares(As, Y) -> np.ndarray:
    coef, _, rank, _ = np.linalg.lstsq(As, Y, rcond=None)
    if rank < As.shape[1]:
        gram = As.conj().T @ As
        coef = np.linalg.solve(gram + RIDGE * np.eye(gram.shape[0]), As.conj().T @ Y)
    return coef


def finish(problem: RecoveryProblem, support, method: str, iterations: int,
           coef=None, converged: bool = True, **info) -> RecoveryResult:
    """Assemble a result on ``support``; gains default to least squares there."""
    support = np.sort(np.asarray(support, dtype=int))
    As = problem.A[:, support]
    if coef is None:
        coef = least_squares(As, problem.Y)
    resid = float(np.linalg.norm(problem.Y - As @ coef))
    xhat = np.zeros((problem.G, problem.P), dtype=complex)
    xhat[support] = coef / problem.col_scale[support, None]
    return RecoveryResult(support=support, xhat=xhat, residual_norm=resid,
                          iterations=int(iterations), method=method,
                          converged=bool(converged), info=info)


def support_error(estimated, truth) -> int:
    """1 when the estimated support differs from the true one as a set, else 0."""
    return int(set(np.asarray(estimated).ravel().tolist()) != set(np.asarray(truth).ravel().tolist()))
