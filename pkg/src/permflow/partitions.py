"""Paired partitions and S-covering partitions.

A paired partition of ``(s1, s2)`` splits both sides into blocks simultaneously,
block by block with matching sizes.  Enumeration is canonical: blocks are
listed by their least ``s1`` element, so every partition appears once.

Text form: ``{0,1}>{2,3}|{2}>{0}``.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import CapExceeded, InvalidSpecError
from .pairings import PairedSubset

DEFAULT_PARTITION_CAP = 6


@dataclass(frozen=True)
class PairedPartition:
    blocks: tuple[PairedSubset, ...]

    def __post_init__(self):
        object.__setattr__(self, "blocks", tuple(self.blocks))
        validate_paired_partition(self.blocks)

    @property
    def s1(self) -> frozenset[int]:
        return frozenset().union(*(b.s1 for b in self.blocks))

    @property
    def s2(self) -> frozenset[int]:
        return frozenset().union(*(b.s2 for b in self.blocks))

    def canonical(self) -> tuple:
        return tuple(sorted(b.sort_key() for b in self.blocks))

    def __str__(self) -> str:
        return "|".join(str(b) for b in sorted(self.blocks, key=PairedSubset.sort_key))


@dataclass(frozen=True)
class SCoveringPartition:
    """Covering blocks (each meets ``S``) plus at most one block disjoint from ``S``."""

    S: frozenset[int]
    covering_blocks: tuple[PairedSubset, ...]
    complement_block: PairedSubset | None = None

    def __post_init__(self):
        object.__setattr__(self, "S", frozenset(self.S))
        object.__setattr__(self, "covering_blocks", tuple(self.covering_blocks))
        cuts = [b.s1 & self.S for b in self.covering_blocks]
        if any(not c for c in cuts):
            raise InvalidSpecError("every covering block must meet S")
        if sum(len(c) for c in cuts) != len(self.S) or frozenset().union(*cuts) != self.S:
            raise InvalidSpecError("covering blocks do not partition S")
        if self.complement_block is not None and self.complement_block.s1 & self.S:
            raise InvalidSpecError("complement block must be disjoint from S")

    @property
    def blocks(self) -> tuple[PairedSubset, ...]:
        extra = () if self.complement_block is None else (self.complement_block,)
        return self.covering_blocks + extra

    def as_paired_partition(self) -> PairedPartition:
        return PairedPartition(self.blocks)

    def __str__(self) -> str:
        return str(self.as_paired_partition())


def validate_paired_partition(blocks: Iterable[PairedSubset]) -> None:
    blocks = list(blocks)
    if not blocks:
        raise InvalidSpecError("a partition needs at least one block")
    for side in ("s1", "s2"):
        seen: set[int] = set()
        for b in blocks:
            part = getattr(b, side)
            if seen & part:
                raise InvalidSpecError(f"blocks overlap on {side}")
            seen |= part


def parse_partition(text: str) -> PairedPartition:
    return PairedPartition(tuple(PairedSubset.from_text(chunk) for chunk in text.split("|")))


def _check_cap(n: int, cap: int | None) -> None:
    cap = DEFAULT_PARTITION_CAP if cap is None else cap
    if n > cap:
        raise CapExceeded(f"paired-partition enumeration of size {n} exceeds cap {cap}")


def _paired_blocks(s1: tuple[int, ...], s2: tuple[int, ...]) -> Iterator[tuple[PairedSubset, ...]]:
    if not s1:
        yield ()
        return
    head, rest = s1[0], s1[1:]
    for size in range(1, len(s1) + 1):
        for others in itertools.combinations(rest, size - 1):
            left = (head,) + others
            rest1 = tuple(v for v in rest if v not in others)
            for right in itertools.combinations(s2, size):
                rest2 = tuple(v for v in s2 if v not in right)
                block = PairedSubset(frozenset(left), frozenset(right))
                for tail in _paired_blocks(rest1, rest2):
                    yield (block,) + tail


def paired_partitions(vs: PairedSubset, cap: int | None = None) -> Iterator[PairedPartition]:
    """Every paired partition of ``vs`` exactly once, in a fixed order."""
    _check_cap(len(vs), cap)
    for blocks in _paired_blocks(tuple(sorted(vs.s1)), tuple(sorted(vs.s2))):
        yield PairedPartition(blocks)


def s_covering_partitions(n: int, S: Iterable[int], cap: int | None = None) -> Iterator[SCoveringPartition]:
    """Paired partitions of the full paired vertex set with at most one block missing ``S``."""
    S = frozenset(S)
    if not S or min(S) < 0 or max(S) >= n:
        raise InvalidSpecError(f"S must be a nonempty subset of range({n})")
    for part in paired_partitions(PairedSubset.full(n), cap):
        covering = tuple(b for b in part.blocks if b.s1 & S)
        rest = [b for b in part.blocks if not b.s1 & S]
        if len(rest) > 1:
            continue
        yield SCoveringPartition(S, covering, rest[0] if rest else None)


def set_partitions(items: Iterable[int]) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Set partitions of ``items``, blocks ordered by least element."""
    items = tuple(sorted(items))
    if not items:
        yield ()
        return
    head, rest = items[0], items[1:]
    for size in range(len(rest) + 1):
        for others in itertools.combinations(rest, size):
            remaining = tuple(v for v in rest if v not in others)
            for tail in set_partitions(remaining):
                yield ((head,) + others,) + tail


def _integer_partitions(n: int, largest: int | None = None) -> Iterator[tuple[int, ...]]:
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for tail in _integer_partitions(n - first, first):
            yield (first,) + tail


def count_paired_partitions(n: int) -> int:
    """Closed-form count: sum over block shapes of (set partitions of that shape)^2
    times the number of size-preserving block matchings.
    """
    if n < 1:
        raise InvalidSpecError("n must be positive")
    if n > 8:
        raise CapExceeded(f"count oracle limited to n <= 8, got {n}")
    total = 0
    for shape in _integer_partitions(n):
        mult = Counter(shape)
        n_shape = math.factorial(n)
        for size in shape:
            n_shape //= math.factorial(size)
        for m in mult.values():
            n_shape //= math.factorial(m)
        matchings = math.prod(math.factorial(m) for m in mult.values())
        total += n_shape * n_shape * matchings
    return total
