"""Ordered paired sets, their group-element reading, and adjacency moves.

An :class:`OrderedPair` is a sequence of ``(src, dst)`` pairs with the
sources in ascending (standard) order.  When the sources cover every vertex
it is a permutation ``src[i] -> dst[i]``; otherwise it is an injection of
the source set into the vertex set.

Text form: ``"0>1,1>0,2>2"``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidSpecError, NotFullError
from .lattice import Lattice


@dataclass(frozen=True, order=True)
class OrderedPair:
    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        src = [p[0] for p in self.pairs]
        dst = [p[1] for p in self.pairs]
        if any(a >= b for a, b in zip(src, src[1:])):
            raise InvalidSpecError(f"sources must be strictly increasing: {src}")
        if len(set(dst)) != len(dst):
            raise InvalidSpecError(f"targets must be distinct: {dst}")

    @classmethod
    def from_maps(cls, src: Sequence[int], dst: Sequence[int]) -> OrderedPair:
        if len(src) != len(dst):
            raise InvalidSpecError("src and dst lengths differ")
        return cls(tuple((int(a), int(b)) for a, b in zip(src, dst)))

    @classmethod
    def identity(cls, n: int) -> OrderedPair:
        return cls(tuple((i, i) for i in range(n)))

    @classmethod
    def from_text(cls, text: str) -> OrderedPair:
        text = text.strip()
        if not text:
            return cls(())
        pairs = []
        for item in text.split(","):
            try:
                a, b = item.split(">")
                pairs.append((int(a), int(b)))
            except ValueError as exc:
                raise InvalidSpecError(f"cannot parse pair {item!r} in {text!r}") from exc
        return cls(tuple(pairs))

    @property
    def src(self) -> tuple[int, ...]:
        return tuple(p[0] for p in self.pairs)

    @property
    def dst(self) -> tuple[int, ...]:
        return tuple(p[1] for p in self.pairs)

    def is_full(self, n: int) -> bool:
        return self.src == tuple(range(n))

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def __str__(self) -> str:
        return ",".join(f"{a}>{b}" for a, b in self.pairs)


@dataclass(frozen=True)
class PairedSubset:
    """Two vertex sets of equal, positive cardinality.  Text form ``{0,1}>{2,3}``."""

    s1: frozenset[int]
    s2: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "s1", frozenset(self.s1))
        object.__setattr__(self, "s2", frozenset(self.s2))
        if len(self.s1) != len(self.s2):
            raise InvalidSpecError(f"paired subset sides differ in size: {sorted(self.s1)} vs {sorted(self.s2)}")
        if not self.s1:
            raise InvalidSpecError("paired subset must be nonempty")

    @classmethod
    def full(cls, n: int) -> PairedSubset:
        return cls(frozenset(range(n)), frozenset(range(n)))

    @classmethod
    def from_text(cls, text: str) -> PairedSubset:
        try:
            left, right = text.strip().split(">")
            return cls(_parse_set(left), _parse_set(right))
        except ValueError as exc:
            raise InvalidSpecError(f"cannot parse paired subset {text!r}") from exc

    def __len__(self) -> int:
        return len(self.s1)

    def sort_key(self) -> tuple:
        return (tuple(sorted(self.s1)), tuple(sorted(self.s2)))

    def __str__(self) -> str:
        return f"{_fmt_set(self.s1)}>{_fmt_set(self.s2)}"


def _fmt_set(s: Iterable[int]) -> str:
    return "{" + ",".join(str(v) for v in sorted(s)) + "}"


def _parse_set(text: str) -> frozenset[int]:
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise ValueError(text)
    body = text[1:-1].strip()
    return frozenset(int(v) for v in body.split(",")) if body else frozenset()


def as_permutation(o: OrderedPair, n: int) -> tuple[int, ...]:
    """The permutation ``p`` with ``p[src[i]] = dst[i]``."""
    if not o.is_full(n) or sorted(o.dst) != list(range(n)):
        raise NotFullError(f"{o} is not a full ordered pair on {n} vertices")
    return o.dst


def rank(o: OrderedPair) -> int:
    """Lexicographic (Lehmer-code) rank of a full ordered pair among all N! of them."""
    n = len(o)
    if not o.is_full(n):
        raise NotFullError(f"{o} is not full")
    return int(rank_injections(np.asarray([o.dst]), n)[0])


def unrank(r: int, n: int) -> OrderedPair:
    if not 0 <= r < math.factorial(n):
        raise InvalidSpecError(f"rank {r} out of range [0, {n}!)")
    remaining = list(range(n))
    dst = []
    for i in range(n):
        f = math.factorial(n - 1 - i)
        q, r = divmod(r, f)
        dst.append(remaining.pop(q))
    return OrderedPair.from_maps(range(n), dst)


def rank_injections(dst: np.ndarray, n: int) -> np.ndarray:
    """Row-wise lexicographic rank of length-k injections into ``range(n)``.

    Matches the enumeration order of ``itertools.permutations(range(n), k)``;
    for ``k == n`` this is the Lehmer rank.
    """
    dst = np.asarray(dst, dtype=np.int64)
    m, k = dst.shape
    out = np.zeros(m, dtype=np.int64)
    for i in range(k):
        smaller_before = (dst[:, :i] < dst[:, i:i + 1]).sum(axis=1)
        digit = dst[:, i] - smaller_before
        out += digit * (math.factorial(n - 1 - i) // math.factorial(n - k))
    return out


def is_subsequence(o: OrderedPair, s: OrderedPair) -> bool:
    """True iff the pairs of ``o`` occur, in order, among the pairs of ``s``."""
    it = iter(s.pairs)
    return all(any(p == q for q in it) for p in o.pairs)


def restrict(o: OrderedPair, S: Iterable[int]) -> OrderedPair:
    """Drop every pair whose source is outside ``S``; may return the empty pair."""
    S = frozenset(S)
    return OrderedPair(tuple(p for p in o.pairs if p[0] in S))


def _swap_values(dst: tuple[int, ...], a: int, b: int) -> tuple[int, ...]:
    return tuple(b if v == a else a if v == b else v for v in dst)


def neighbors_full(o: OrderedPair, lattice: Lattice) -> list[OrderedPair]:
    """One neighbour per lattice edge ``{a, b}``: swap the values ``a`` and ``b`` in ``dst``."""
    if not o.is_full(lattice.n_vertices):
        raise NotFullError(f"{o} is not full on {lattice.n_vertices} vertices")
    return [OrderedPair.from_maps(o.src, _swap_values(o.dst, a, b)) for a, b in lattice.edges]


def neighbors_partial(o: OrderedPair, lattice: Lattice) -> list[OrderedPair]:
    """Swap moves along fully occupied edges, then single-vertex hops onto vacant neighbours."""
    occupied = set(o.dst)
    swaps = [
        OrderedPair.from_maps(o.src, _swap_values(o.dst, a, b))
        for a, b in lattice.edges
        if a in occupied and b in occupied
    ]
    hops = []
    for pos, v in enumerate(o.dst):
        for w in sorted(lattice.adjacency[v]):
            if w not in occupied:
                dst = o.dst[:pos] + (w,) + o.dst[pos + 1:]
                hops.append(OrderedPair.from_maps(o.src, dst))
    return swaps + hops


def orderings_of(vs: PairedSubset) -> list[OrderedPair]:
    """All ordered pairs onto ``vs``: sources fixed ascending, targets in every order."""
    src = sorted(vs.s1)
    return [OrderedPair.from_maps(src, dst) for dst in itertools.permutations(sorted(vs.s2))]
