"""Finite rectangular lattices and the single-particle heat kernel.

Vertices are numbered in row-major order of their coordinates (last axis
fastest).  That numbering is the fixed standard ordering used everywhere else
in the package and is deliberately not configurable.  Boundaries are open.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Sequence

import numpy as np
import scipy.sparse

from . import _integrate
from .errors import InvalidSpecError

METHODS = ("exact-spectral", "ode")


@dataclass(frozen=True)
class Lattice:
    """A ``dims[0] x dims[1] x ...`` grid with nearest-neighbour edges.

    Build through :func:`build_lattice`; the vertex and edge tuples are
    derived from ``dims`` and compared by value.
    """

    dims: tuple[int, ...]
    coords: tuple[tuple[int, ...], ...] = field(repr=False, compare=False)
    edges: tuple[tuple[int, int], ...] = field(repr=False, compare=False)
    adjacency: tuple[frozenset[int], ...] = field(repr=False, compare=False)

    @property
    def d(self) -> int:
        return len(self.dims)

    @property
    def n_vertices(self) -> int:
        return len(self.coords)

    @property
    def vertices(self) -> range:
        return range(len(self.coords))

    @property
    def max_degree(self) -> int:
        return max(len(a) for a in self.adjacency)

    def index(self, coord: Sequence[int]) -> int:
        """Row-major index of a coordinate tuple."""
        idx = 0
        for c, n in zip(coord, self.dims):
            if not 0 <= c < n:
                raise InvalidSpecError(f"coordinate {tuple(coord)} outside lattice {self.dims}")
            idx = idx * n + c
        return idx

    @cached_property
    def laplacian_generator(self) -> np.ndarray:
        """Dense ``A - D``: unit rate per edge, rows sum to zero."""
        n = self.n_vertices
        Q = np.zeros((n, n))
        for a, b in self.edges:
            Q[a, b] += 1.0
            Q[b, a] += 1.0
        Q[np.diag_indices(n)] = -Q.sum(axis=1)
        return Q


def build_lattice(dims: Sequence[int]) -> Lattice:
    """Construct the lattice with the given per-axis extents.

    >>> build_lattice([2, 2]).edges
    ((0, 1), (0, 2), (1, 3), (2, 3))
    """
    try:
        dims = tuple(int(n) for n in dims)
    except (TypeError, ValueError) as exc:
        raise InvalidSpecError(f"dims must be integers, got {dims!r}") from exc
    return _build(dims)


@lru_cache(maxsize=None)
def _build(dims: tuple[int, ...]) -> Lattice:
    if not dims:
        raise InvalidSpecError("a lattice needs at least one axis")
    if any(n < 1 for n in dims):
        raise InvalidSpecError(f"every extent must be >= 1, got {dims}")
    n_total = int(np.prod(dims))
    if n_total < 2:
        raise InvalidSpecError(f"a lattice needs at least 2 vertices, got {dims}")

    coords = tuple(itertools.product(*(range(n) for n in dims)))
    index = {c: i for i, c in enumerate(coords)}
    edges = []
    for i, c in enumerate(coords):
        for axis in range(len(dims)):
            if c[axis] + 1 < dims[axis]:
                nb = c[:axis] + (c[axis] + 1,) + c[axis + 1:]
                edges.append((i, index[nb]))
    edges.sort()
    adjacency = [set() for _ in coords]
    for a, b in edges:
        adjacency[a].add(b)
        adjacency[b].add(a)
    return Lattice(
        dims=dims,
        coords=coords,
        edges=tuple(edges),
        adjacency=tuple(frozenset(a) for a in adjacency),
    )


def neighbors(lattice: Lattice, v: int) -> frozenset[int]:
    if not 0 <= v < lattice.n_vertices:
        raise InvalidSpecError(f"vertex {v} out of range [0, {lattice.n_vertices})")
    return lattice.adjacency[v]


@dataclass(frozen=True, eq=False)
class HeatKernel:
    """``g[i, j]``: probability that a walker started at ``i`` sits at ``j`` after time ``t``."""

    t: float
    g: np.ndarray

    @property
    def n(self) -> int:
        return self.g.shape[0]


@lru_cache(maxsize=None)
def _laplacian_eig(lattice: Lattice):
    return _integrate.eigendecompose(lattice.laplacian_generator)


def heat_kernel(lattice: Lattice, t: float, method: str = "exact-spectral") -> HeatKernel:
    """Green's function of ``dg/dt = (A - D) g`` with ``g(0) = I``.

    Parameters
    ----------
    lattice : Lattice
    t : float
        Nonnegative time.
    method : {"exact-spectral", "ode"}
        ``exact-spectral`` diagonalises the symmetric generator; ``ode`` runs
        fixed-step RK4.

    Returns
    -------
    HeatKernel
        ``g`` is exactly the identity at ``t == 0`` for either method.
    """
    t = float(t)
    if t < 0:
        raise InvalidSpecError(f"time must be nonnegative, got {t}")
    if method not in METHODS:
        raise InvalidSpecError(f"unknown method {method!r}; expected one of {METHODS}")
    n = lattice.n_vertices
    if t == 0:
        g = np.eye(n)
    elif method == "exact-spectral":
        g = _integrate.spectral_propagate(_laplacian_eig(lattice), np.eye(n), t)
        g = 0.5 * (g + g.T)
    else:
        Q = scipy.sparse.csr_matrix(lattice.laplacian_generator)
        g = _integrate.rk4_propagate(Q, np.eye(n), t)
    g.setflags(write=False)
    return HeatKernel(t=t, g=g)
