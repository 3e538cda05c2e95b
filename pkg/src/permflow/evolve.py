"""Heat flow on the permutation group and its ordered-pair marginals.

A :class:`DistributionTable` is dense over all N! group elements, indexed by
Lehmer rank.  A :class:`MarginalTable` for a context set ``S`` with ``|S| = k``
is dense over the N!/(N-k)! injections ``S -> V``, indexed by the
lexicographic rank of the target tuple.
"""
from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator

import numpy as np
import scipy.sparse

from . import _integrate
from .errors import InvalidSpecError, NotFullError, StateSpaceTooLarge
from .lattice import METHODS, Lattice
from .pairings import OrderedPair, rank_injections

SPECTRAL_CAP = 5040
ODE_CAP = 40320
CAP_ENV = "PERMFLOW_CAP_FACTORIAL"


def factorial_cap(method: str, cap: int | None = None) -> int:
    """Largest admissible state-space size for ``method``.

    An explicit ``cap`` wins, then the ``PERMFLOW_CAP_FACTORIAL`` environment
    variable, then the per-method default.
    """
    if cap is not None:
        return int(cap)
    env = os.environ.get(CAP_ENV)
    if env:
        return int(env)
    return SPECTRAL_CAP if method == "exact-spectral" else ODE_CAP


def check_size(n_states: int, method: str, cap: int | None = None) -> None:
    limit = factorial_cap(method, cap)
    if n_states > limit:
        raise StateSpaceTooLarge(
            f"{n_states} states exceeds the {method} cap of {limit} "
            f"(raise it with --cap-factorial or {CAP_ENV})"
        )


def _check_method(method: str) -> None:
    if method not in METHODS:
        raise InvalidSpecError(f"unknown method {method!r}; expected one of {METHODS}")


@dataclass(frozen=True, eq=False)
class DistributionTable:
    n: int
    t: float
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (math.factorial(self.n),):
            raise InvalidSpecError(f"table length {values.shape} does not match {self.n}!")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __getitem__(self, o: OrderedPair) -> float:
        if len(o) != self.n or not o.is_full(self.n):
            raise NotFullError(f"{o} is not a group element on {self.n} vertices")
        return float(self.values[rank_injections(np.asarray([o.dst]), self.n)[0]])

    def items(self) -> Iterator[tuple[OrderedPair, float]]:
        src = tuple(range(self.n))
        for dst, value in zip(injections(self.n, self.n), self.values):
            yield OrderedPair.from_maps(src, dst), float(value)


@dataclass(frozen=True, eq=False)
class MarginalTable:
    n: int
    S: tuple[int, ...]
    t: float
    values: np.ndarray

    def __post_init__(self):
        S = tuple(sorted(set(self.S)))
        if not S or S[0] < 0 or S[-1] >= self.n:
            raise InvalidSpecError(f"context set {self.S} must be a nonempty subset of range({self.n})")
        values = np.asarray(self.values, dtype=float)
        expected = math.perm(self.n, len(S))
        if values.shape != (expected,):
            raise InvalidSpecError(f"marginal table length {values.shape} != {expected}")
        values.setflags(write=False)
        object.__setattr__(self, "S", S)
        object.__setattr__(self, "values", values)

    @property
    def k(self) -> int:
        return len(self.S)

    def __getitem__(self, o: OrderedPair) -> float:
        if o.src != self.S:
            raise InvalidSpecError(f"{o} is not an ordered pair onto context set {self.S}")
        return float(self.values[rank_injections(np.asarray([o.dst]), self.n)[0]])

    def keys(self) -> list[OrderedPair]:
        return [OrderedPair.from_maps(self.S, dst) for dst in injections(self.n, self.k)]

    def items(self) -> Iterator[tuple[OrderedPair, float]]:
        for o, v in zip(self.keys(), self.values):
            yield o, float(v)


@lru_cache(maxsize=16)
def injections(n: int, k: int) -> np.ndarray:
    """All length-``k`` injections into ``range(n)`` in lexicographic order, shape (n!/(n-k)!, k)."""
    out = np.array(list(itertools.permutations(range(n), k)), dtype=np.int64).reshape(-1, k)
    out.setflags(write=False)
    return out


def _swap_columns_values(P: np.ndarray, a: int, b: int) -> np.ndarray:
    return np.where(P == a, b, np.where(P == b, a, P))


@lru_cache(maxsize=32)
def move_generator(lattice: Lattice, k: int) -> scipy.sparse.csr_matrix:
    """Generator on injections of size ``k``: for every edge touching an occupied target,
    exchange the two endpoint labels (a swap if both are occupied, a hop otherwise).

    With ``k == N`` this is the group walk; with ``k < N`` it carries both move types
    of the marginal equation.
    """
    n = lattice.n_vertices
    P = injections(n, k)
    m = P.shape[0]
    rows, cols = [], []
    degree = np.zeros(m)
    for a, b in lattice.edges:
        touched = ((P == a) | (P == b)).any(axis=1)
        idx = np.nonzero(touched)[0]
        target = rank_injections(_swap_columns_values(P[idx], a, b), n)
        rows.append(idx)
        cols.append(target)
        degree[idx] += 1.0
    rows = np.concatenate(rows + [np.arange(m)])
    cols = np.concatenate(cols + [np.arange(m)])
    data = np.concatenate([np.ones(len(rows) - m), -degree])
    return scipy.sparse.csr_matrix((data, (rows, cols)), shape=(m, m))


@lru_cache(maxsize=8)
def _move_eig(lattice: Lattice, k: int):
    return _integrate.eigendecompose(move_generator(lattice, k))


def propagate(lattice: Lattice, k: int, x0: np.ndarray, t: float, method: str) -> np.ndarray:
    _check_method(method)
    if t < 0:
        raise InvalidSpecError(f"time must be nonnegative, got {t}")
    if t == 0:
        return np.array(x0, dtype=float, copy=True)
    if method == "exact-spectral":
        return _integrate.spectral_propagate(_move_eig(lattice, k), x0, t)
    return _integrate.rk4_propagate(move_generator(lattice, k), x0, t)


def initial_delta(n: int) -> DistributionTable:
    """Point mass at the identity permutation, ``t = 0``."""
    if n < 2:
        raise InvalidSpecError("need at least 2 vertices")
    values = np.zeros(math.factorial(n))
    values[0] = 1.0
    return DistributionTable(n=n, t=0.0, values=values)


def generator_apply(C: DistributionTable, lattice: Lattice) -> np.ndarray:
    """``out[o] = sum over neighbours o' of (C[o'] - C[o])``."""
    _check_lattice(C.n, lattice)
    return move_generator(lattice, C.n) @ C.values


def evolve(
    C0: DistributionTable,
    lattice: Lattice,
    t: float,
    method: str = "exact-spectral",
    cap: int | None = None,
) -> DistributionTable:
    """Advance ``C0`` by time ``t`` under the interchange walk."""
    _check_lattice(C0.n, lattice)
    _check_method(method)
    check_size(len(C0.values), method, cap)
    values = propagate(lattice, C0.n, C0.values, float(t), method)
    return DistributionTable(n=C0.n, t=C0.t + float(t), values=values)


def _check_lattice(n: int, lattice: Lattice) -> None:
    if lattice.n_vertices != n:
        raise InvalidSpecError(f"table has {n} vertices but lattice has {lattice.n_vertices}")


def marginalize(C: DistributionTable, o: OrderedPair) -> float:
    """Total weight of group elements whose pairs contain those of ``o`` as a subsequence."""
    if len(o) == 0:
        raise InvalidSpecError("the empty ordered pair has no marginal")
    P = injections(C.n, C.n)
    src = list(o.src)
    mask = np.all(P[:, src] == np.asarray(o.dst), axis=1)
    return float(C.values[mask].sum())


def marginal_table(C: DistributionTable, S: Iterable[int]) -> MarginalTable:
    S = tuple(sorted(set(S)))
    if not S:
        raise InvalidSpecError("context set must be nonempty")
    P = injections(C.n, C.n)
    idx = rank_injections(P[:, list(S)], C.n)
    values = np.bincount(idx, weights=C.values, minlength=math.perm(C.n, len(S)))
    return MarginalTable(n=C.n, S=S, t=C.t, values=values)


def marginal_generator_apply(m: MarginalTable, lattice: Lattice) -> np.ndarray:
    _check_lattice(m.n, lattice)
    return move_generator(lattice, m.k) @ m.values


def evolve_marginal(m: MarginalTable, lattice: Lattice, t: float, method: str = "exact-spectral") -> MarginalTable:
    _check_lattice(m.n, lattice)
    values = propagate(lattice, m.k, m.values, float(t), method)
    return MarginalTable(n=m.n, S=m.S, t=m.t + float(t), values=values)


def verify_marginal_heat(
    lattice: Lattice,
    S: Iterable[int],
    t: float,
    method: str = "exact-spectral",
    C0: DistributionTable | None = None,
    cap: int | None = None,
) -> float:
    """Max discrepancy between "evolve then marginalize" and "marginalize then evolve"."""
    n = lattice.n_vertices
    C0 = initial_delta(n) if C0 is None else C0
    check_size(math.factorial(n), method, cap)
    via_group = marginal_table(evolve(C0, lattice, t, method, cap), S)
    via_marginal = evolve_marginal(marginal_table(C0, S), lattice, t, method)
    return float(np.max(np.abs(via_group.values - via_marginal.values)))


def inverse_ranks(n: int) -> np.ndarray:
    """``inverse_ranks(n)[r]`` is the rank of the inverse of the permutation with rank ``r``."""
    P = injections(n, n)
    inv = np.empty_like(P)
    rows = np.arange(P.shape[0])[:, None]
    inv[rows, P] = np.arange(n)[None, :]
    return rank_injections(inv, n)
