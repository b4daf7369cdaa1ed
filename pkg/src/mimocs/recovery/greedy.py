"""Beamforming, matching-pursuit family and the exhaustive l0 search."""
from __future__ import annotations

import itertools
import math

import numpy as np

from ..geometry import ConfigurationError
from ._common import (RecoveryError, RecoveryProblem, finish, least_squares, row_norms,
                      top_k)

# Projected column energy below this is treated as already spanned.
_SPAN_TOL = 1e-10


def beamform(problem: RecoveryProblem):
    """Peaks of ``||a_g^H Y||_2`` over the grid, with least-squares gains."""
    scores = row_norms(problem.A.conj().T @ problem.Y)
    return finish(problem, top_k(scores, problem.K), "beamform", 1)


def _check_greedy(problem):
    if problem.K > problem.MN:
        raise ConfigurationError(f"K={problem.K} greedy steps need K <= MN={problem.MN}")


def omp(problem: RecoveryProblem):
    """Orthogonal matching pursuit (row-norm correlation for several snapshots)."""
    _check_greedy(problem)
    A, Y = problem.A, problem.Y
    support = []
    R = Y
    history = [float(np.linalg.norm(R))]
    for _ in range(problem.K):
        scores = row_norms(A.conj().T @ R)
        scores[support] = -np.inf
        support.append(int(np.argmax(scores)))
        coef = least_squares(A[:, support], Y)
        R = Y - A[:, support] @ coef
        history.append(float(np.linalg.norm(R)))
    return finish(problem, support, "omp", problem.K, residual_history=history)


class _OrthState:
    """Selected support with an orthonormal basis of its span.

    ``proj`` holds ``||Q^H a_g||^2`` for every (unit-norm) column, so the
    energy of column ``g`` outside the span is ``1 - proj[g]``.
    """

    __slots__ = ("A", "support", "Q", "proj", "R")

    def __init__(self, A, R, support=(), Q=None, proj=None):
        self.A = A
        self.R = R
        self.support = tuple(support)
        self.Q = np.zeros((A.shape[0], 0), dtype=complex) if Q is None else Q
        self.proj = np.zeros(A.shape[1]) if proj is None else proj

    @property
    def residual_norm(self) -> float:
        return float(np.linalg.norm(self.R))

    def scores(self, rank_aware: bool, K: int) -> np.ndarray:
        """Residual-norm reduction for each candidate column.

        With ``rank_aware`` and several snapshots, the residual is replaced by
        an orthonormal basis of its dominant ``K - |S|`` dimensional subspace.
        For a single snapshot that basis is ``r / ||r||``, a constant rescaling,
        so the residual itself is used and the ranking matches plain OLS.
        """
        R = self.R
        if rank_aware and R.shape[1] > 1:
            U, s, _ = np.linalg.svd(R, full_matrices=False)
            rank = int(np.sum(s > s[0] * 1e-10)) if s.size and s[0] > 0 else 0
            r = max(1, min(rank, K - len(self.support)))
            R = U[:, :r]
        num = np.sum(np.abs(self.A.conj().T @ R) ** 2, axis=1)
        denom = 1.0 - self.proj
        out = np.full(num.shape, -np.inf)
        ok = denom > _SPAN_TOL
        out[ok] = num[ok] / denom[ok]
        if self.support:
            out[list(self.support)] = -np.inf
        return out

    def add(self, g: int) -> "_OrthState":
        v = self.A[:, g]
        # two Gram-Schmidt passes keep Q orthonormal to working precision
        for _ in range(2):
            v = v - self.Q @ (self.Q.conj().T @ v)
        nrm = np.linalg.norm(v)
        if nrm <= math.sqrt(_SPAN_TOL):
            raise RecoveryError(f"column {g} lies in the span of the current support")
        v = v / nrm
        Q = np.column_stack([self.Q, v])
        proj = self.proj + np.abs(v.conj() @ self.A) ** 2
        R = self.R - np.outer(v, v.conj() @ self.R)
        return _OrthState(self.A, R, self.support + (g,), Q, proj)


def _greedy_orth(problem: RecoveryProblem, rank_aware: bool, method: str):
    _check_greedy(problem)
    st = _OrthState(problem.A, problem.Y)
    history = [st.residual_norm]
    for _ in range(problem.K):
        sc = st.scores(rank_aware, problem.K)
        g = int(np.argmax(sc))
        if not np.isfinite(sc[g]):
            raise RecoveryError("no admissible column left")
        st = st.add(g)
        history.append(st.residual_norm)
    return finish(problem, st.support, method, problem.K, residual_history=history)


def ols(problem: RecoveryProblem):
    """Orthogonal least squares: add the column giving the largest residual-norm drop."""
    return _greedy_orth(problem, rank_aware=False, method="ols")


def ra_ormp(problem: RecoveryProblem):
    """Rank-aware order-recursive matching pursuit (equals OLS for one snapshot)."""
    return _greedy_orth(problem, rank_aware=True, method="raormp")


def mbmp(problem: RecoveryProblem, d=None, max_leaves: int = 10_000):
    """Multi-branch matching pursuit.

    A depth-``K`` tree: at level ``i`` every node branches on its ``d[i]``
    best columns under the OLS criterion (rank-aware for several snapshots).
    Nodes reaching an already-seen support are merged, and the leaf with the
    smallest residual wins. ``d = [1, ..., 1]`` follows the single OLS /
    RA-ORMP path exactly.
    """
    _check_greedy(problem)
    K = problem.K
    d = [1] * K if d is None else [int(v) for v in d]
    if len(d) != K or min(d) < 1:
        raise ConfigurationError(f"branch vector needs {K} entries >= 1, got {d}")
    if math.prod(d) > max_leaves:
        raise RecoveryError(f"branch vector {d} exceeds the {max_leaves}-leaf cap")
    rank_aware = problem.P > 1
    frontier = [_OrthState(problem.A, problem.Y)]
    nodes = 0
    for level in range(K):
        seen = set()
        nxt = []
        for st in frontier:
            sc = st.scores(rank_aware, K)
            for g in top_k(sc, d[level]):
                if not np.isfinite(sc[g]):
                    break
                key = frozenset(st.support + (int(g),))
                if key in seen:
                    continue
                seen.add(key)
                nxt.append(st.add(int(g)))
                nodes += 1
        if not nxt:
            raise RecoveryError("tree search ran out of admissible columns")
        frontier = nxt
    best = frontier[0]
    for st in frontier[1:]:
        if st.residual_norm < best.residual_norm:
            best = st
    return finish(problem, best.support, "mbmp", nodes, leaves=len(frontier), branch=d)


def cosamp(problem: RecoveryProblem, max_iter: int = 50, tol: float = 1e-6):
    """Compressive sampling matching pursuit (row norms for several snapshots).

    Stops when the residual norm changes by less than ``tol`` relative, or
    vanishes. Returns the lowest-residual iterate; ``converged`` is False when
    ``max_iter`` ran out first.
    """
    if max_iter < 1:
        raise ValueError("cosamp needs max_iter >= 1")
    K = problem.K
    if 2 * K > problem.MN:
        raise ConfigurationError(f"cosamp needs 2K <= MN, got K={K}, MN={problem.MN}")
    A, Y = problem.A, problem.Y
    y_norm = float(np.linalg.norm(Y))
    support = np.zeros(0, dtype=int)
    R = Y
    prev = y_norm
    best = (np.inf, support, 0)
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        omega = top_k(row_norms(A.conj().T @ R), 2 * K)
        T = np.union1d(omega, support)
        b = least_squares(A[:, T], Y)
        keep = top_k(row_norms(b), K)
        support = T[keep]
        R = Y - A[:, support] @ b[keep]
        r = float(np.linalg.norm(R))
        if r < best[0]:
            best = (r, support, it)
        if r <= 1e-12 * y_norm or abs(prev - r) <= tol * prev:
            converged = True
            break
        prev = r
    return finish(problem, best[1], "cosamp", it, converged=converged, best_iteration=best[2])


def l0_oracle(problem: RecoveryProblem, max_subsets: int = 1_000_000):
    """Exhaustive search for the K-subset with the smallest least-squares residual."""
    G, K = problem.G, problem.K
    total = math.comb(G, K)
    if total > max_subsets:
        raise RecoveryError(f"C({G},{K}) = {total} subsets exceeds the guard of {max_subsets}")
    A, Y = problem.A, problem.Y
    best_r, best_s = np.inf, None
    for subset in itertools.combinations(range(G), K):
        As = A[:, subset]
        coef = least_squares(As, Y)
        r = float(np.linalg.norm(Y - As @ coef))
        if r < best_r:
            best_r, best_s = r, subset
    return finish(problem, best_s, "l0", total, subsets=total)
