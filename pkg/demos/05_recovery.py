"""Recover a three-target scene with every method in the registry.

Run: python demos/05_recovery.py
"""
from mimocs.geometry import ArrayConfig, canonical_grid, sample_positions
from mimocs.model import build_matrix, observe, sigma_from_snr, synthesize_scene
from mimocs.recovery import METHODS, RecoveryProblem, recover, support_error

cfg = ArrayConfig(5, 5, 50)
grid = canonical_grid(cfg.Z)
A = build_matrix(cfg, sample_positions(cfg, seed=3), grid, normalized=True)
scene = synthesize_scene(grid, K=3, P=1, seed=4)
sigma = sigma_from_snr(20.0)
Y = observe(A, scene, sigma, seed=5)
problem = RecoveryProblem(A, Y, 3, sigma)

print("true support:", scene.support.tolist())
for name in METHODS:
    res = recover(name, problem)
    print(f"{name:9s} {res.support.tolist()}  errors={support_error(res.support, scene.support)}")
