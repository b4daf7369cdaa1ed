"""Basis-pursuit denoising ``min ||X||_{2,1} s.t. ||A X - Y||_F <= eps``.

Solved with Douglas-Rachford splitting between the row-wise soft threshold
and the exact Euclidean projection onto the residual ball. The projection
goes through a thin SVD of ``A`` and a scalar secular equation, so every
returned iterate is feasible up to rounding. A duality gap serves as the
optimality certificate.
"""
from __future__ import annotations

import numpy as np

from ._common import RecoveryProblem, finish, row_norms, top_k


def row_soft_threshold(Z, t):
    n = row_norms(Z)
    scale = np.zeros_like(n)
    big = n > t
    scale[big] = 1.0 - t / n[big]
    return Z * scale[:, None]


class ResidualBallProjector:
    """Euclidean projection onto ``{X : ||A X - Y||_F <= eps}``."""

    def __init__(self, A, Y, eps):
        U, s, Vh = np.linalg.svd(A, full_matrices=False)
        keep = s > s[0] * 1e-12
        self.U, self.s, self.Vh = U[:, keep], s[keep], Vh[keep]
        self.V = self.Vh.conj().T
        self.beta = self.U.conj().T @ Y
        y2 = float(np.linalg.norm(Y) ** 2)
        self.perp2 = max(y2 - float(np.linalg.norm(self.beta) ** 2), 0.0)
        self.eps = float(eps)
        self._lam = 0.0
        # allow for round-off in perp2 when Y lies in the range of A
        if self.perp2 > self.eps ** 2 * (1 + 1e-12) + 1e-12 * y2:
            raise ValueError("the residual ball does not intersect the range of A")

    def __call__(self, X):
        alpha = self.Vh @ X
        s = self.s[:, None]
        miss = s * alpha - self.beta
        d = np.sum(np.abs(miss) ** 2, axis=1)
        if np.sum(d) + self.perp2 <= self.eps ** 2:
            return X
        if self.eps == 0.0:
            new = self.beta / s
        else:
            lam = self._lam = self._multiplier(d, self._lam)
            new = (alpha + lam * s * self.beta) / (1.0 + lam * s * s)
        return X + self.V @ (new - alpha)

    def _multiplier(self, d, lam=0.0):
        # Newton on 1/eps - 1/rho(lam), which is close to linear in lam;
        # warm-started from the previous call's multiplier
        s2 = self.s ** 2
        for _ in range(100):
            w = 1.0 + lam * s2
            rho2 = np.sum(d / w ** 2) + self.perp2
            rho = np.sqrt(rho2)
            drho = -np.sum(d * s2 / w ** 3) / rho
            h = 1.0 / self.eps - 1.0 / rho
            step = h / (drho / rho2)
            lam_new = lam - step
            if lam_new <= 0:
                lam_new = 0.5 * lam if lam > 0 else 1e-12
            if abs(lam_new - lam) <= 1e-14 * max(lam_new, 1e-300):
                return lam_new
            lam = lam_new
        return lam


def _dual_value(A, Y, nu, eps):
    """Dual objective ``Re<nu, Y> - eps ||nu||`` after scaling ``nu`` into the dual ball."""
    corr = float(np.max(row_norms(A.conj().T @ nu)))
    if corr == 0.0:
        return -np.inf
    nu = nu / corr
    return float(np.real(np.vdot(nu, Y))) - eps * float(np.linalg.norm(nu))


def duality_gap(A, Y, X, eps, nu=None):
    """``||X||_{2,1}`` minus the best dual objective found.

    The residual ``Y - A X`` is always tried as a dual direction; ``nu`` adds
    another candidate (the solver passes one built from its subgradient, which
    stays informative when the residual vanishes).
    """
    primal = float(np.sum(row_norms(X)))
    dual = _dual_value(A, Y, Y - A @ X, eps)
    if nu is not None:
        dual = max(dual, _dual_value(A, Y, nu, eps))
    if not np.isfinite(dual):
        return primal, primal
    return primal - dual, primal


def lasso_bpdn(problem: RecoveryProblem, radius_factor: float = 1.0, max_iter: int = 5000,
               tol: float = 1e-7, gap_tol: float = 1e-4, feas_tol: float = 1e-6,
               step: float = None, check_every: int = 10):
    """Support of the l1 (row-l2,1) minimizer inside the noise ball.

    The ball radius is ``radius_factor * sigma * sqrt(MN * P)``, the expected
    norm of the noise matrix. The reported ``converged`` flag requires
    feasibility within ``feas_tol`` (relative to the radius, or to ``||Y||``
    for a zero radius) together with either a relative duality gap below
    ``gap_tol`` or a Douglas-Rachford fixed-point residual below ``tol``.
    The ``K`` rows of largest norm form the support; their estimated values
    are kept as gains.
    """
    A, Y, K = problem.A, problem.Y, problem.K
    eps = radius_factor * problem.sigma * np.sqrt(problem.MN * problem.P)
    y_norm = float(np.linalg.norm(Y))
    if y_norm <= eps:
        # zero is feasible, hence optimal
        return finish(problem, np.arange(K), "lasso", 0,
                      coef=np.zeros((K, problem.P), dtype=complex), gap=0.0, eps=float(eps),
                      feasible=True, constraint_residual=y_norm, l1_norm=0.0,
                      x_full=np.zeros((problem.G, problem.P), dtype=complex))

    project = ResidualBallProjector(A, Y, eps)
    Z = A.conj().T @ Y
    if step is None:
        step = 0.2 * float(np.max(row_norms(Z)))
    X = W = Z
    converged = False
    gap = np.inf
    it = 0
    for it in range(1, max_iter + 1):
        X = row_soft_threshold(Z, step)
        W = project(2 * X - Z)
        diff = W - X
        Z = Z + diff
        if it % check_every == 0:
            scale = max(1.0, float(np.linalg.norm(X)))
            fixed = float(np.linalg.norm(diff)) <= tol * scale
            # (Z - X) / step is a subgradient of the l2,1 norm at X; its
            # least-squares preimage under A^H gives a dual candidate
            nu = project.U @ ((project.Vh @ (Z - X)) / project.s[:, None])
            g, primal = duality_gap(A, Y, W, eps, nu)
            gap = g / max(primal, 1e-300)
            if fixed or gap <= gap_tol:
                converged = True
                break

    Xhat = W
    resid = float(np.linalg.norm(Y - A @ Xhat))
    limit = eps * (1 + feas_tol) if eps > 0 else feas_tol * y_norm
    feasible = resid <= limit
    support = top_k(row_norms(Xhat), K)
    order = np.argsort(support)
    return finish(problem, support[order], "lasso", it, coef=Xhat[support[order]],
                  converged=converged and feasible, feasible=feasible, gap=float(gap),
                  eps=float(eps), constraint_residual=resid,
                  l1_norm=float(np.sum(row_norms(Xhat))),
                  x_full=Xhat / problem.col_scale[:, None])
