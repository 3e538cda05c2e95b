"""A random walk on permutations, and why its marginals are simple.

Each lattice edge swaps the labels on its two endpoints at unit rate.  The full
distribution C(t) lives on N! permutations, but the marginal on a set S of
labels evolves on its own: evolving then marginalizing matches marginalizing
then evolving under the smaller generator.
"""
import math

from permflow import build_lattice, evolve, initial_delta, marginal_table
from permflow.evolve import evolve_marginal, verify_marginal_heat
from permflow.pairings import OrderedPair

lat = build_lattice([2])
for t in (0.1, 1.0, 3.0):
    C = evolve(initial_delta(2), lat, t)
    print(f"two sites, t={t}: P(identity) = {C[OrderedPair.identity(2)]:.10f}, "
          f"closed form {(1 + math.exp(-2 * t)) / 2:.10f}")

lat = build_lattice([2, 2])
C = evolve(initial_delta(4), lat, 1.0)
print(f"\n2x2 lattice, {len(C.values)} states, total mass {C.values.sum():.15f}")

m = marginal_table(C, {0, 3})
print("\nwhere do labels 0 and 3 end up at t=1?")
for o, v in sorted(m.items(), key=lambda kv: -kv[1])[:5]:
    print(f"  {o}: {v:.6f}")

direct = evolve_marginal(marginal_table(initial_delta(4), {0, 3}), lat, 1.0)
print(f"\nmarginal evolved on its own, max gap {abs(direct.values - m.values).max():.1e}")
print(f"same check for every S: {max(verify_marginal_heat(lat, S, 1.0) for S in [{0}, {1, 2}, {0, 1, 3}]):.1e}")
