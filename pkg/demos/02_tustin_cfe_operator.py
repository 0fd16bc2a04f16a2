"""
Tustin CFE operators
====================

The degree-9 rational approximation of the Tustin half derivative, its
pole locations, and the frequency band where it can be trusted.
"""

import numpy as np

from fracstate import SampledSignal, cfe_operator, cfe_polynomials

poly = cfe_polynomials(0.5)
print("Q_9(0.5) =", np.round(poly.Q, 3))
print("P_9(0.5) =", np.round(poly.P, 3))

# Poles of the filter in z: all inside the unit circle for 0 < r < 1.
poles = np.roots(poly.Q)
print(f"\nmax |pole| = {np.max(np.abs(poles)):.4f}")

# Compare the discrete response with (j w)^0.5 at a few normalized frequencies.
T = 0.1
op = cfe_operator(0.5, T)
print("\n w T     |H| / |jw|^0.5   phase error (deg)")
for wT in (0.01, 0.05, 0.3, 1.0, 2.5):
    z = np.exp(1j * wT)
    x = 1 / z
    H = np.polyval(op.numerator[::-1], x) / np.polyval(op.denominator[::-1], x)
    ideal = (1j * wT / T) ** 0.5
    print(f"{wT:5.2f}   {abs(H) / abs(ideal):12.4f}   {np.degrees(np.angle(H / ideal)):10.2f}")

# At T = 0.05 the ramp's semi-derivative is close; far below the band it is not.
for T in (0.05, 1e-3):
    ramp = SampledSignal.from_function(lambda t: t, T, int(round(1 / T)) + 1)
    value = cfe_operator(0.5, T).apply(ramp).samples[-1]
    print(f"\nT = {T:g}: CFE D^0.5 t at t = 1 = {value:.4f}  (exact 1.1284)")
