import itertools

import pytest

from permflow.errors import CapExceeded, InvalidSpecError
from permflow.pairings import PairedSubset
from permflow.partitions import (
    PairedPartition,
    SCoveringPartition,
    count_paired_partitions,
    paired_partitions,
    parse_partition,
    s_covering_partitions,
    set_partitions,
)


def brute_paired_count(s1, s2):
    """(partition of s1) x (partition of s2) x (size-preserving block bijections)."""
    total = 0
    parts1 = list(set_partitions(s1))
    parts2 = list(set_partitions(s2))
    for p1 in parts1:
        for p2 in parts2:
            sizes1 = sorted(map(len, p1))
            if sizes1 != sorted(map(len, p2)):
                continue
            for perm in itertools.permutations(range(len(p2))):
                if all(len(p1[i]) == len(p2[perm[i]]) for i in range(len(p1))):
                    total += 1
    return total


def test_singleton():
    parts = list(paired_partitions(PairedSubset({5}, {2})))
    assert [str(p) for p in parts] == ["{5}>{2}"]


def test_two_element():
    parts = {str(p) for p in paired_partitions(PairedSubset({0, 1}, {0, 1}))}
    assert parts == {"{0,1}>{0,1}", "{0}>{0}|{1}>{1}", "{0}>{1}|{1}>{0}"}


def test_three_element_by_shape():
    parts = list(paired_partitions(PairedSubset.full(3)))
    shapes = [tuple(sorted((len(b) for b in p.blocks), reverse=True)) for p in parts]
    assert len(parts) == 16
    assert shapes.count((3,)) == 1 and shapes.count((2, 1)) == 9 and shapes.count((1, 1, 1)) == 6


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_enumeration_matches_counts(n):
    vs = PairedSubset.full(n)
    parts = list(paired_partitions(vs))
    assert len(parts) == count_paired_partitions(n) == brute_paired_count(tuple(range(n)), tuple(range(n)))
    assert len({p.canonical() for p in parts}) == len(parts)
    for p in parts:
        assert p.s1 == vs.s1 and p.s2 == vs.s2
        assert sum(len(b) for b in p.blocks) == n


def test_disjoint_sides():
    vs = PairedSubset({0, 2, 4}, {1, 3, 5})
    assert len(list(paired_partitions(vs))) == 16


def test_count_values():
    assert [count_paired_partitions(n) for n in (1, 2, 3)] == [1, 3, 16]


def test_caps():
    with pytest.raises(CapExceeded):
        list(paired_partitions(PairedSubset.full(7)))
    assert sum(1 for _ in paired_partitions(PairedSubset.full(2), cap=2)) == 3
    with pytest.raises(CapExceeded):
        count_paired_partitions(9)


def test_paired_partition_validation():
    with pytest.raises(InvalidSpecError):
        PairedPartition((PairedSubset({0}, {1}), PairedSubset({0}, {2})))
    with pytest.raises(InvalidSpecError):
        PairedPartition(())


def test_text_form_round_trip():
    p = parse_partition("{0,1}>{2,3}|{2}>{0}")
    assert str(p) == "{0,1}>{2,3}|{2}>{0}"


def test_s_covering_two_sites():
    parts = list(s_covering_partitions(2, {0}))
    described = {(str(PairedPartition(p.covering_blocks)), None if p.complement_block is None else str(p.complement_block)) for p in parts}
    assert described == {
        ("{0,1}>{0,1}", None),
        ("{0}>{0}", "{1}>{1}"),
        ("{0}>{1}", "{1}>{0}"),
    }


def test_s_covering_full_set_never_has_complement():
    parts = list(s_covering_partitions(3, {0, 1, 2}))
    assert len(parts) == 16
    assert all(p.complement_block is None for p in parts)


@pytest.mark.parametrize("n, S", [(3, {0, 1}), (3, {2}), (4, {1, 2}), (4, {0})])
def test_s_covering_filter_oracle(n, S):
    expected = set()
    for p in paired_partitions(PairedSubset.full(n)):
        if sum(1 for b in p.blocks if not b.s1 & S) <= 1:
            expected.add(p.canonical())
    got = list(s_covering_partitions(n, S))
    assert {p.as_paired_partition().canonical() for p in got} == expected
    assert len(got) == len(expected)
    for p in got:
        cuts = [b.s1 & S for b in p.covering_blocks]
        assert all(cuts)
        assert frozenset().union(*cuts) == S and sum(map(len, cuts)) == len(S)
        if p.complement_block is not None:
            assert not p.complement_block.s1 & S


def test_s_covering_rejects_bad_designation():
    with pytest.raises(InvalidSpecError):
        SCoveringPartition({0}, (PairedSubset({1}, {1}),), PairedSubset({0}, {0}))
    with pytest.raises(InvalidSpecError):
        list(s_covering_partitions(3, set()))


@pytest.mark.parametrize("n, bell", [(0, 1), (1, 1), (3, 5), (5, 52)])
def test_set_partitions_bell(n, bell):
    parts = list(set_partitions(range(n)))
    assert len(parts) == bell
    assert all(block[0] == min(block) for p in parts for block in p)
