"""The normalising constant c(t) and its large-time limit.

c solves c^N perm(g(t)) = 1.  At t = 0 the kernel is the identity and c = 1.
At large t the kernel is uniform, perm = N!/N^N, and c tends to
(N!/N^N)^(-1/N), which creeps up towards e as N grows.
"""
import math

import numpy as np

from permflow import build_lattice, c_asymptotic, heat_kernel, permanent, solve_c
from permflow.permanent import mc_estimate_permanent

lat = build_lattice([2, 3])
print("t      c(t)")
for t in (0.0, 0.25, 0.5, 1.0, 2.0, 5.0, 50.0):
    print(f"{t:<6} {solve_c(heat_kernel(lat, t)):.8f}")
print(f"limit  {c_asymptotic(lat.n_vertices):.8f}")

print("\nN      limit       gap to e")
for n in (2, 4, 8, 16, 100, 1000):
    print(f"{n:<6} {c_asymptotic(n):.6f}   {math.e - c_asymptotic(n):.6f}")

g = heat_kernel(lat, 1.0).g
est, se = mc_estimate_permanent(g, 100_000, seed=0)
print(f"\nperm(g(1)) exact {permanent(g):.6f}, Monte Carlo {est:.6f} +/- {se:.6f}")
print(f"uniform 3x3: {permanent(np.full((3, 3), 1 / 3))} vs 2/9 = {2 / 9}")
