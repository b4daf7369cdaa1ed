import numpy as np
import pytest

from mimocs import ArrayConfig, build_matrix, canonical_grid, observe, sample_positions
from mimocs import synthesize_scene
from mimocs.recovery import RecoveryProblem

# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES = {}


def record_acceptance(number, passed, detail=""):
    ACCEPTANCE_LINES[number] = f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}"


@pytest.fixture
def record():
    return record_acceptance


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])


def make_problem(M=4, N=4, Z=50, K=3, P=1, sigma=0.0, seed=0, normalized=True):
    """Random canonical-grid instance; returns ``(problem, scene, A)``."""
    cfg = ArrayConfig(M, N, Z)
    grid = canonical_grid(Z)
    A = build_matrix(cfg, sample_positions(cfg, (seed, 0)), grid, normalized=normalized)
    scene = synthesize_scene(grid, K, P, (seed, 1))
    Y = observe(A, scene, sigma, (seed, 2))
    return RecoveryProblem(A, Y, K, sigma), scene, A


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def oracle_instances(count, seed=0, Z=29, K_choices=(1, 2)):
    """Noiseless problems with ``K < (1 + 1/mu) / 2`` on a ``G = Z + 1 <= 30`` grid.

    Array sizes are drawn with ``MN >= 12``; draws violating the coherence
    condition are skipped, so every returned instance has a unique sparsest
    solution that the greedy and convex methods are expected to find.
    """
    from mimocs.pattern_stats import coherence

    rng = np.random.default_rng(seed)
    grid = canonical_grid(Z)
    out = []
    while len(out) < count:
        M, N = (int(v) for v in rng.integers(3, 9, size=2))
        if M * N < 12:
            continue
        K = int(rng.choice(K_choices))
        cfg = ArrayConfig(M, N, Z)
        A = build_matrix(cfg, sample_positions(cfg, rng), grid, normalized=True)
        mu = coherence(A).mu
        if not K < (1 + 1 / mu) / 2:
            continue
        scene = synthesize_scene(grid, K, 1, rng)
        Y = observe(A, scene, 0.0)
        out.append((RecoveryProblem(A, Y, K, 0.0), scene, mu))
    return out
