"""Forgetting the ordering: from ordered-pair marginals to functions on subsets.

Summing a marginal table over the orderings of each target set gives a
function on the k-subsets of the vertex set.  That function evolves under the
exclusion-process generator (a particle hops to a vacant neighbour at unit
rate), which is the k-magnon sector of the Heisenberg ferromagnet.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import numpy as np
import scipy.sparse

from . import _integrate
from .errors import DegenerateContext, InvalidSpecError
from .evolve import DistributionTable, MarginalTable, evolve, initial_delta, injections, marginal_table
from .lattice import METHODS, Lattice


@lru_cache(maxsize=32)
def subsets(n: int, k: int) -> tuple[tuple[int, ...], ...]:
    """All k-subsets of ``range(n)`` as sorted tuples, lexicographic."""
    return tuple(itertools.combinations(range(n), k))


@lru_cache(maxsize=32)
def _subset_index(n: int, k: int) -> dict[tuple[int, ...], int]:
    return {s: i for i, s in enumerate(subsets(n, k))}


@dataclass(frozen=True, eq=False)
class SubsetFunction:
    n: int
    s: tuple[int, ...]
    t: float
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "s", tuple(sorted(self.s)))
        values = np.asarray(self.values, dtype=float)
        if values.shape != (math.comb(self.n, len(self.s)),):
            raise InvalidSpecError(f"subset function length {values.shape} != C({self.n}, {len(self.s)})")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def k(self) -> int:
        return len(self.s)

    def __getitem__(self, subset: Iterable[int]) -> float:
        key = tuple(sorted(subset))
        return float(self.values[_subset_index(self.n, self.k)[key]])

    def items(self):
        for key, v in zip(subsets(self.n, self.k), self.values):
            yield key, float(v)


def forgetful(m: MarginalTable) -> SubsetFunction:
    """Sum the marginal over the orderings of each target set."""
    k = m.k
    P = injections(m.n, k)
    index = _subset_index(m.n, k)
    # rows of P are in the same order as m.values
    target = np.fromiter((index[tuple(sorted(row))] for row in P.tolist()), dtype=np.int64, count=len(P))
    values = np.bincount(target, weights=m.values, minlength=math.comb(m.n, k))
    return SubsetFunction(n=m.n, s=m.S, t=m.t, values=values)


def subset_neighbors(s_prime: Iterable[int], lattice: Lattice) -> list[frozenset[int]]:
    """Move one element of ``s_prime`` to a lattice neighbour outside ``s_prime``."""
    occupied = frozenset(s_prime)
    out = []
    for v in sorted(occupied):
        for w in sorted(lattice.adjacency[v]):
            if w not in occupied:
                out.append((occupied - {v}) | {w})
    return out


@lru_cache(maxsize=32)
def spinwave_generator(lattice: Lattice, k: int) -> scipy.sparse.csr_matrix:
    n = lattice.n_vertices
    index = _subset_index(n, k)
    rows, cols, data = [], [], []
    for i, s in enumerate(subsets(n, k)):
        nbrs = subset_neighbors(s, lattice)
        for nb in nbrs:
            rows.append(i)
            cols.append(index[tuple(sorted(nb))])
            data.append(1.0)
        rows.append(i)
        cols.append(i)
        data.append(-float(len(nbrs)))
    m = len(index)
    return scipy.sparse.csr_matrix((data, (rows, cols)), shape=(m, m))


@lru_cache(maxsize=8)
def _spinwave_eig(lattice: Lattice, k: int):
    return _integrate.eigendecompose(spinwave_generator(lattice, k))


def spinwave_generator_apply(f: SubsetFunction, lattice: Lattice) -> np.ndarray:
    return spinwave_generator(lattice, f.k) @ f.values


def evolve_subset_function(f: SubsetFunction, lattice: Lattice, t: float, method: str = "exact-spectral") -> SubsetFunction:
    if method not in METHODS:
        raise InvalidSpecError(f"unknown method {method!r}")
    if t < 0:
        raise InvalidSpecError(f"time must be nonnegative, got {t}")
    if t == 0:
        values = f.values
    elif method == "exact-spectral":
        values = _integrate.spectral_propagate(_spinwave_eig(lattice, f.k), f.values, t)
    else:
        values = _integrate.rk4_propagate(spinwave_generator(lattice, f.k), f.values, t)
    return SubsetFunction(n=f.n, s=f.s, t=f.t + t, values=values)


def _pipeline(s: Iterable[int], C: DistributionTable) -> SubsetFunction:
    return forgetful(marginal_table(C, s))


def verify_forgetful(
    lattice: Lattice,
    s: Iterable[int],
    t: float,
    method: str = "exact-spectral",
    C0: DistributionTable | None = None,
) -> float:
    """Max gap between "evolve group, marginalize, forget" and "forget at t=0, evolve subsets"."""
    C0 = initial_delta(lattice.n_vertices) if C0 is None else C0
    s = tuple(sorted(set(s)))
    via_group = _pipeline(s, evolve(C0, lattice, t, method))
    via_subsets = evolve_subset_function(_pipeline(s, C0), lattice, t, method)
    return float(np.max(np.abs(via_group.values - via_subsets.values)))


def complement(S: Iterable[int], n: int) -> frozenset[int]:
    S = frozenset(S)
    if S and (min(S) < 0 or max(S) >= n):
        raise InvalidSpecError(f"{sorted(S)} is not a subset of range({n})")
    return frozenset(range(n)) - S


def verify_duality(
    lattice: Lattice,
    s: Iterable[int],
    t: float,
    method: str = "exact-spectral",
    C: DistributionTable | None = None,
) -> float:
    """Max over ``s'`` of the gap between the ``s`` and complement-of-``s`` subset functions,
    each computed end to end from the evolved group table."""
    n = lattice.n_vertices
    s = frozenset(s)
    if not 1 <= len(s) <= n - 1:
        raise DegenerateContext(f"need 1 <= |s| <= {n - 1}, got |s| = {len(s)}")
    if C is None:
        C = evolve(initial_delta(n), lattice, t, method)
    direct = _pipeline(s, C)
    dual = _pipeline(complement(s, n), C)
    gaps = [abs(v - dual[complement(key, n)]) for key, v in direct.items()]
    return float(max(gaps))
