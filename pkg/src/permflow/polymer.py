"""Polymer expansion of the group heat flow and of its marginals.

A candidate solution is a table of polymer weights ``u`` on ordered pairs of any
size, plus boundary weights ``w`` on paired subsets.  Unlisted ``w`` values are
derived from ``u`` by summing over paired partitions; the empty complement
always carries weight 1.

Serialized form (one entry per line, sorted)::

    u: 0>1,1>0 = 0.25
    w: {1}>{0} = 1
"""
from __future__ import annotations

import itertools
import math
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

from .errors import CapExceeded, ConditionNotApplicable, InvalidSpecError, NotFullError
from .evolve import DistributionTable, marginal_table
from .lattice import HeatKernel
from .pairings import OrderedPair, PairedSubset, is_subsequence, restrict
from .partitions import DEFAULT_PARTITION_CAP, paired_partitions, s_covering_partitions, set_partitions
from .permanent import permanent

BlockKey = tuple[frozenset, frozenset]


def _block_key(o: OrderedPair) -> BlockKey:
    return frozenset(o.src), frozenset(o.dst)


@dataclass(frozen=True, eq=False)
class UTable:
    """Polymer weights; absent keys are zero."""

    entries: Mapping[OrderedPair, float]
    t: float = 0.0

    def get(self, o: OrderedPair) -> float:
        return self.entries.get(o, 0.0)

    @cached_property
    def by_block(self) -> dict[BlockKey, list[tuple[OrderedPair, float]]]:
        groups: dict[BlockKey, list] = defaultdict(list)
        for o, v in sorted(self.entries.items()):
            groups[_block_key(o)].append((o, v))
        return dict(groups)

    def block_sum(self, vs: PairedSubset) -> float:
        """Sum of ``u`` over every ordering onto ``vs``."""
        return float(sum(v for _, v in self.by_block.get((vs.s1, vs.s2), ())))


@dataclass(frozen=True, eq=False)
class WTable:
    entries: Mapping[PairedSubset, float] = field(default_factory=dict)


class PolymerSolution:
    """A ``u`` table with explicit ``w`` overrides; other ``w`` values come from :func:`derive_w`."""

    def __init__(self, u: UTable, w: WTable | None = None, label: str = ""):
        self.u = u
        self.w = WTable() if w is None else w
        self.label = label
        self._derived: dict[PairedSubset, float] = {}

    def w_value(self, vs: PairedSubset | None, cap: int | None = None) -> float:
        if vs is None:
            return 1.0
        if vs in self.w.entries:
            return self.w.entries[vs]
        if vs not in self._derived:
            self._derived[vs] = derive_w(self.u, vs, cap)
        return self._derived[vs]

    def __repr__(self) -> str:
        return f"PolymerSolution(label={self.label!r}, |u|={len(self.u.entries)}, |w|={len(self.w.entries)})"


def _check_cap(n: int, cap: int | None) -> None:
    limit = DEFAULT_PARTITION_CAP if cap is None else cap
    if n > limit:
        raise CapExceeded(f"expansion over {n} vertices exceeds partition cap {limit}")


def eval_C_expansion(sol: PolymerSolution, o: OrderedPair, mode: str = "reduced", cap: int | None = None) -> float:
    """Evaluate the polymer expansion of ``C`` at the group element ``o``.

    ``literal`` sums over all paired partitions of the full paired vertex set and,
    per block, over the ``u`` entries whose pairs sit inside ``o``.  ``reduced``
    uses the fact that at most one such entry exists per block, namely the
    restriction of ``o`` to the block's sources, so only set partitions of the
    vertex set are visited.
    """
    n = len(o)
    if n == 0 or not o.is_full(n):
        raise NotFullError(f"{o} is not a group element")
    _check_cap(n, cap)
    u = sol.u
    total = 0.0
    if mode == "literal":
        for part in paired_partitions(PairedSubset.full(n), cap):
            prod = 1.0
            for block in part.blocks:
                inner = sum(v for ok, v in u.by_block.get((block.s1, block.s2), ()) if is_subsequence(ok, o))
                prod *= inner
                if prod == 0.0:
                    break
            total += prod
    elif mode == "reduced":
        for part in set_partitions(range(n)):
            prod = 1.0
            for block in part:
                prod *= u.get(restrict(o, block))
                if prod == 0.0:
                    break
            total += prod
    else:
        raise InvalidSpecError(f"unknown mode {mode!r}")
    return float(total)


def eval_marginal_expansion(
    sol: PolymerSolution,
    S: Iterable[int],
    o: OrderedPair,
    n: int,
    mode: str = "reduced",
    complement_in_product: bool = False,
    cap: int | None = None,
) -> float:
    """Evaluate the S-covering expansion of the marginal ``c^S`` at ``o``.

    Each covering block contributes the sum of ``u`` over entries whose
    restriction to ``S`` sits inside ``o``; the complement block, when present,
    contributes ``w`` of the complement.  With ``complement_in_product`` the
    complement block additionally enters the product with its (vacuous)
    restriction condition, i.e. as the plain sum of ``u`` over its orderings.
    """
    S = frozenset(S)
    if frozenset(o.src) != S:
        raise InvalidSpecError(f"{o} is not an ordered pair onto {sorted(S)}")
    _check_cap(n, cap)
    u = sol.u
    if mode == "reduced":
        by_restriction = _restricted_sums(u, S)
        o_map = dict(o.pairs)
    elif mode != "literal":
        raise InvalidSpecError(f"unknown mode {mode!r}")

    total = 0.0
    for part in s_covering_partitions(n, S, cap):
        prod = 1.0
        for block in part.covering_blocks:
            if mode == "literal":
                inner = sum(
                    v for ok, v in u.by_block.get((block.s1, block.s2), ()) if is_subsequence(restrict(ok, S), o)
                )
            else:
                inner = by_restriction.get(
                    (block.s1, block.s2, tuple((a, o_map[a]) for a in sorted(block.s1 & S))), 0.0
                )
            prod *= inner
            if prod == 0.0:
                break
        if prod == 0.0:
            continue
        comp = part.complement_block
        if comp is not None and complement_in_product:
            prod *= u.block_sum(comp)
        prod *= sol.w_value(comp, cap)
        total += prod
    return float(total)


def _restricted_sums(u: UTable, S: frozenset) -> dict:
    out: dict = defaultdict(float)
    for o, v in u.entries.items():
        out[(frozenset(o.src), frozenset(o.dst), restrict(o, S).pairs)] += v
    return out


def derive_w(u: UTable, vs: PairedSubset, cap: int | None = None) -> float:
    """Boundary weight: sum over paired partitions of ``vs`` of the product of
    per-block ``u`` sums (all orderings, no containment condition)."""
    total = 0.0
    for part in paired_partitions(vs, cap):
        prod = 1.0
        for block in part.blocks:
            prod *= u.block_sum(block)
            if prod == 0.0:
                break
        total += prod
    return float(total)


def trivial_solution(C: DistributionTable) -> PolymerSolution:
    """``u = C`` on group elements, zero on smaller ordered pairs."""
    entries = {o: v for o, v in C.items()}
    return PolymerSolution(UTable(entries, C.t), WTable(), label="trivial")


def rank1_solution(g: HeatKernel, c: float) -> PolymerSolution:
    """Singleton weights ``u(({i},{j})) = c g_ij`` and ``w = 1`` on every complement of a singleton pair."""
    mat = np.asarray(g.g)
    n = mat.shape[0]
    entries = {OrderedPair(((i, j),)): float(c * mat[i, j]) for i in range(n) for j in range(n)}
    everything = frozenset(range(n))
    w = {}
    if n > 1:
        w = {
            PairedSubset(everything - {i}, everything - {j}): 1.0
            for i in range(n)
            for j in range(n)
        }
    return PolymerSolution(UTable(entries, g.t), WTable(w), label=f"rank1(c={c!r})")


def solve_c(g) -> float:
    """The positive ``c`` with ``c^N perm(g) = 1``."""
    mat = np.asarray(getattr(g, "g", g), dtype=float)
    p = permanent(mat)
    if not p > 0:
        raise InvalidSpecError(f"permanent {p} is not positive; no real c exists")
    return float(p ** (-1.0 / mat.shape[0]))


def c_asymptotic(n: int) -> float:
    """``(N!/N^N)^(-1/N)``, the value of ``c`` for a uniform kernel; tends to e."""
    if n < 1:
        raise InvalidSpecError("N must be positive")
    return math.exp((n * math.log(n) - math.lgamma(n + 1)) / n)


def check_sum_condition(u: UTable, vs: PairedSubset) -> float:
    """Sum of ``u`` over all orderings onto ``vs``; zero when the optional condition holds."""
    if len(vs) <= 1:
        raise ConditionNotApplicable("the zero-sum condition applies only when |S| > 1")
    return u.block_sum(vs)


def expansion_residual(
    sol: PolymerSolution,
    C_exact: DistributionTable,
    S: Iterable[int] | None = None,
    mode: str = "reduced",
    complement_in_product: bool = False,
    cap: int | None = None,
) -> float:
    """Max absolute gap between the expansion and the exact table (full ``C`` or the marginal on ``S``)."""
    if S is None:
        return max(abs(eval_C_expansion(sol, o, mode, cap) - v) for o, v in C_exact.items())
    exact = marginal_table(C_exact, S)
    return max(
        abs(eval_marginal_expansion(sol, exact.S, o, C_exact.n, mode, complement_in_product, cap) - v)
        for o, v in exact.items()
    )


def all_ordered_pairs(n: int) -> list[OrderedPair]:
    """Every ordered pair of size 1..n over ``range(n)``."""
    out = []
    for k in range(1, n + 1):
        for src in itertools.combinations(range(n), k):
            for dst in itertools.permutations(range(n), k):
                out.append(OrderedPair.from_maps(src, dst))
    return out


def random_sparse_utable(n: int, density: float, seed: int) -> UTable:
    """Fuzz table: each ordered pair kept with probability ``density``, value uniform in [-1, 1]."""
    rng = np.random.default_rng(seed)
    keys = all_ordered_pairs(n)
    keep = rng.random(len(keys)) < density
    vals = rng.uniform(-1.0, 1.0, len(keys))
    return UTable({o: float(v) for o, v, k in zip(keys, vals, keep) if k})


def dumps_solution(sol: PolymerSolution) -> str:
    lines = [f"u: {o} = {v:.17g}" for o, v in sol.u.entries.items()]
    lines += [f"w: {vs} = {v:.17g}" for vs, v in sol.w.entries.items()]
    return "\n".join(sorted(lines)) + "\n"


def loads_solution(text: str, label: str = "loaded", t: float = 0.0) -> PolymerSolution:
    u: dict[OrderedPair, float] = {}
    w: dict[PairedSubset, float] = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            kind, rest = line.split(":", 1)
            key, value = rest.rsplit("=", 1)
            value = float(value)
        except ValueError as exc:
            raise InvalidSpecError(f"line {lineno}: cannot parse {line!r}") from exc
        kind = kind.strip()
        if kind == "u":
            u[OrderedPair.from_text(key)] = value
        elif kind == "w":
            w[PairedSubset.from_text(key)] = value
        else:
            raise InvalidSpecError(f"line {lineno}: unknown entry kind {kind!r}")
    return PolymerSolution(UTable(u, t), WTable(w), label=label)
