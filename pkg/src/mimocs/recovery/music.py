"""MUSIC pseudo-spectrum over the dictionary grid."""
from __future__ import annotations

import numpy as np

from ._common import RecoveryProblem, finish, top_k


def music(problem: RecoveryProblem):
    """Grid MUSIC with ``MN - K`` noise eigenvectors of ``Y Y^H / P``.

    Support is taken from the ``K`` highest local maxima of
    ``1 / ||E_n^H a_g||^2``, padded with the highest remaining grid values
    when fewer peaks exist. With ``P <= K`` snapshots the signal subspace
    cannot be separated from noise; the estimate is still produced and
    ``info['degenerate']`` is set.
    """
    A, Y, K = problem.A, problem.Y, problem.K
    MN, P = problem.MN, problem.P
    R = Y @ Y.conj().T / P
    _, vecs = np.linalg.eigh(R)          # ascending eigenvalues
    n_noise = MN - K
    if n_noise < 1:
        spectrum = np.ones(problem.G)
    else:
        En = vecs[:, :n_noise]
        proj = np.sum(np.abs(En.conj().T @ A) ** 2, axis=0)
        spectrum = 1.0 / np.maximum(proj, 1e-300)
    peaks = _local_maxima(spectrum)
    ranked = peaks[top_k(spectrum[peaks], K)]
    if ranked.size < K:
        rest = np.setdiff1d(np.arange(problem.G), ranked)
        ranked = np.concatenate([ranked, rest[top_k(spectrum[rest], K - ranked.size)]])
    degenerate = P <= K or n_noise < 1
    return finish(problem, ranked, "music", 1, degenerate=degenerate, spectrum=spectrum)


def _local_maxima(x):
    left = np.concatenate([[-np.inf], x[:-1]])
    right = np.concatenate([x[1:], [-np.inf]])
    return np.flatnonzero((x >= left) & (x > right))
