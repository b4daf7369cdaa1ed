"""Empirical coherence ccdf against the analytic tail bound.

Run: python demos/03_coherence_bound.py
"""
import numpy as np

from mimocs.experiments import ExperimentConfig, run

q = np.round(np.linspace(0.1, 0.5, 9), 3)
res = run(ExperimentConfig(protocol="ccdf", Z=250, mn_list=[(10, 10)], trials=500,
                           q_grid=q, base_seed=7))
print("    q   Pr(mu>q)   bound")
for row in res.rows:
    print(f"{row[0]:5.2f}   {row[1]:8.3f}   {row[2]:.3f}")
