"""
Grünwald-Letnikov differintegrals
=================================

Binomial weights, a semi-derivative with a known answer, and what a
finite memory window costs.
"""

import math

import numpy as np

from fracstate import SampledSignal, gl_coefficients, gl_differintegrate

# The weights of D^0.5 decay like j^-1.5; those of D^-0.5 (a half
# integral) decay like j^-0.5, which is why long memory matters more there.
for r in (0.5, -0.5):
    b = gl_coefficients(r, 5).coeffs
    print(f"r = {r:+.1f}: b_0..b_5 =", np.round(b, 5))

# Semi-derivative of f(t) = t is 2 sqrt(t / pi).
T = 1e-3
ramp = SampledSignal.from_function(lambda t: t, T, 1001)
half = gl_differintegrate(ramp, 0.5, memory_len_samples=1001)
print(f"\nD^0.5 t at t = 1: {half.samples[-1]:.6f}  exact {2 / math.sqrt(math.pi):.6f}")

# Applying it twice gives the first derivative: the weight series multiply exactly.
twice = gl_differintegrate(half, 0.5, 1001)
print(f"D^0.5 D^0.5 t at t = 1: {twice.samples[-1]:.12f}")

# Short memory: keep only the last L samples of the history sum.
print("\nmemory L   D^0.5 t at t = 1")
for L in (10, 100, 1000):
    value = gl_differintegrate(ramp, 0.5, L).samples[-1]
    print(f"{L:8d}   {value:.5f}")
