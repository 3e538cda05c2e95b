"""Writing C as a sum over partitions.

A polymer solution assigns a weight u to ordered pairs.  The expansion of C at
a permutation sums, over partitions of the vertex set, the product of the u
weights sitting inside that permutation.  Putting all weight on full
permutations (the trivial solution) reproduces C exactly.  The rank-one
ansatz u = c * g on single pairs is not exact but is normalised by c.
"""
import math

from permflow import build_lattice, evolve, heat_kernel, initial_delta, permanent, rank1_solution, solve_c, trivial_solution
from permflow.evolve import DistributionTable
from permflow.pairings import PairedSubset, unrank
from permflow.polymer import PolymerSolution, derive_w, eval_C_expansion, expansion_residual, random_sparse_utable

lat = build_lattice([2, 2])
C = evolve(initial_delta(4), lat, 1.0)

triv = trivial_solution(C)
print(f"trivial solution, worst error over C:        {expansion_residual(triv, C):.1e}")
print(f"trivial solution, worst error over marginals: "
      f"{max(expansion_residual(triv, C, S) for S in [{0}, {1, 2}, {0, 2, 3}]):.1e}")

# the boundary weight w follows from u; the marginal expansion then holds for any u
sol = PolymerSolution(random_sparse_utable(3, 0.4, seed=1))
C3 = DistributionTable(3, 0.0, [eval_C_expansion(sol, unrank(r, 3)) for r in range(6)])
print(f"\nrandom u on 3 sites, marginal expansion error: "
      f"{max(expansion_residual(sol, C3, S) for S in [{0}, {1}, {0, 2}]):.1e}")
print(f"same, with the complement block inside the product: "
      f"{max(expansion_residual(sol, C3, S, complement_in_product=True) for S in [{0}, {1}, {0, 2}]):.3f}")

g = heat_kernel(lat, 1.0)
c = solve_c(g)
r1 = rank1_solution(g, c)
total = sum(eval_C_expansion(r1, unrank(r, 4)) for r in range(math.factorial(4)))
print(f"\nrank-one ansatz, c = {c:.6f}: total mass {total:.12f}, perm(g) = {permanent(g.g):.6f}")
print(f"rank-one error against the true C: {expansion_residual(r1, C):.3f}")
print(f"derived w on {{0,1}}>{{2,3}}: {derive_w(r1.u, PairedSubset({0, 1}, {2, 3})):.6f}")
