"""
Controllability of the state-space form
=======================================
"""

from fracstate import FodeModel, controllability, decompose

ss = decompose(FodeModel(a2=0.8, a1=0.5, a0=1.0, alpha=2.2, beta=0.9))
report = controllability(ss)
print("A   =", ss.A.tolist())
print("B   =", ss.B.tolist())
print("Q_R =", report.Q_R.tolist())
print("rank", report.rank, "with tolerance", report.tolerance)

# The rank only depends on A and B, so a1 = 0 keeps it.
print("a1 = 0 rank:", controllability(decompose(FodeModel(1.0, 0.0, 2.0, 1.8, 0.6))).rank)
