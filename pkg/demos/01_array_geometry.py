"""Random MIMO array, its measurement matrix and the Toeplitz Gram structure.

Run: python demos/01_array_geometry.py
"""
import numpy as np

from mimocs.geometry import ArrayConfig, canonical_grid, sample_positions
from mimocs.model import build_matrix
from mimocs.pattern_stats import coherence, gram, toeplitz_spread

cfg = ArrayConfig(M=6, N=6, Z=50)
grid = canonical_grid(cfg.Z)
pos = sample_positions(cfg, seed=1)
print(f"grid: {grid.G} points, spacing {2 / cfg.Z:.3f} in sin(theta)")
print("tx positions:", np.round(pos.xi, 3))
print("rx positions:", np.round(pos.zeta, 3))

A = build_matrix(cfg, pos, grid, normalized=True)
Q = gram(A)
print(f"A is {A.shape[0]} x {A.shape[1]}")
# on the canonical grid every diagonal of Q is constant
print(f"largest spread along a diagonal of Q: {toeplitz_spread(Q):.1e}")
print(f"coherence of this draw: {coherence(A).mu:.3f}")
