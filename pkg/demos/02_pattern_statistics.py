"""Monte Carlo check of the mean and variance of the random array pattern.

Run: python demos/02_pattern_statistics.py
"""
import numpy as np

from mimocs.geometry import ArrayConfig, Uniform, sample_positions
from mimocs.pattern_stats import analytic_stats, array_pattern

M = N = 8
u = np.array([np.pi / 2, np.pi, 2 * np.pi])
cfg = ArrayConfig(M, N, 50)
draws = np.array([array_pattern(sample_positions(cfg, s), u) for s in range(20000)])
ref = analytic_stats(Uniform(), Uniform(), M, N, u)

print("u/pi   mean(emp)          mean(th)   var Re emp/th       var Im emp/th")
for i, ui in enumerate(u):
    print(f"{ui / np.pi:4.1f}  {draws[:, i].mean():.4f}  {ref.mean[i].real:9.4f}   "
          f"{draws[:, i].real.var():.5f}/{ref.var_re[i]:.5f}   "
          f"{draws[:, i].imag.var():.5f}/{ref.var_im[i]:.5f}")
