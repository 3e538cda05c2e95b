"""Forgetting the order of labels.

Summing a marginal over the orderings of its target set gives a function of a
k-subset: where the k labels sit, not which is where.  That function obeys the
exclusion-process (spin-wave) heat equation, and the k-subset picture for S
mirrors the (N-k)-subset picture for the complement of S.
"""
from permflow import build_lattice, evolve, forgetful, initial_delta, marginal_table, verify_duality, verify_forgetful

lat = build_lattice([2, 3])
C = evolve(initial_delta(6), lat, 0.5)

f = forgetful(marginal_table(C, {0, 1}))
print("labels {0,1} at t=0.5, most likely site pairs:")
for key, v in sorted(f.items(), key=lambda kv: -kv[1])[:4]:
    print(f"  {key}: {v:.6f}")

print(f"\nforgetful diagram residual, s={{0,1}}: {verify_forgetful(lat, {0, 1}, 0.5):.1e}")
print(f"duality residual, s={{0,1}} vs {{2,3,4,5}}: {verify_duality(lat, {0, 1}, 0.5, C=C):.1e}")
print(f"duality residual, s={{2}}: {verify_duality(lat, {2}, 0.5, C=C):.1e}")
