"""How many elements the guarantees ask for, and the special functions behind them.

Run: python demos/04_element_counts.py
"""
from mimocs.bounds import (bessel_k1, lambert_w_minus1, lambert_w_minus1_asymptotic, report,
                           uniform_recovery_mn)

print(report(K=5, G=251, epsilon=0.1))
for K in (1, 3, 5, 10):
    print(f"K={K:2d}: MN >= {uniform_recovery_mn(K, 251, 0.1):9.1f}")
print(f"K1(1) = {bessel_k1(1.0):.10f}")
for gamma in (1e2, 1e4, 1e8):
    w = lambert_w_minus1(-gamma ** -2.0)
    print(f"gamma={gamma:.0e}: W_-1 = {w:.6f}, asymptotic = {lambert_w_minus1_asymptotic(gamma):.6f}")
