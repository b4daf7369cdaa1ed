"""FOCUSS / M-FOCUSS: regularized iteratively reweighted minimum-norm solutions."""
from __future__ import annotations

import numpy as np

from ._common import RecoveryError, RecoveryProblem, finish, row_norms, top_k


def focuss(problem: RecoveryProblem, p_norm: float = 0.8, max_iter: int = 100,
           tol: float = 1e-4, lam: float = None, prune: float = 1e-8):
    """Row-sparse estimate by FOCUSS reweighting.

    Each pass sets ``W = diag(||x_i||^(1 - p/2))`` from the current row norms
    and solves ``X = W (A W)^H (A W (A W)^H + lam I)^-1 Y``. The damping
    ``lam`` defaults to ``sigma**2``; with ``lam = 0`` the minimum-norm least
    squares solution is used instead. Rows whose weight falls below
    ``prune`` times the largest are frozen at zero.
    """
    if not 0 < p_norm <= 1:
        raise ValueError(f"p_norm must lie in (0, 1], got {p_norm}")
    A, Y, K = problem.A, problem.Y, problem.K
    lam = problem.sigma ** 2 if lam is None else float(lam)
    MN = problem.MN

    def solve(Aw):
        if lam > 0:
            return Aw.conj().T @ np.linalg.solve(Aw @ Aw.conj().T + lam * np.eye(MN), Y)
        return np.linalg.lstsq(Aw, Y, rcond=None)[0]

    X = solve(A)
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        w = row_norms(X) ** (1.0 - p_norm / 2.0)
        wmax = w.max()
        if not np.isfinite(wmax):
            raise RecoveryError(f"FOCUSS diverged at iteration {it}")
        if wmax == 0:
            break
        w[w < prune * wmax] = 0.0
        X_new = w[:, None] * solve(A * w)
        if not np.all(np.isfinite(X_new)):
            raise RecoveryError(
                f"FOCUSS produced non-finite values at iteration {it} "
                f"(last finite row-norm max {wmax:.3g})")
        change = np.linalg.norm(X_new - X) / max(np.linalg.norm(X), 1e-300)
        X = X_new
        if change < tol:
            converged = True
            break
    support = np.sort(top_k(row_norms(X), K))
    return finish(problem, support, "focuss", it, coef=X[support], converged=converged)
