import itertools
import math

import numpy as np
import pytest
import scipy.linalg

from permflow.errors import InvalidSpecError, StateSpaceTooLarge
from permflow.evolve import (
    DistributionTable,
    evolve,
    evolve_marginal,
    generator_apply,
    initial_delta,
    inverse_ranks,
    marginal_generator_apply,
    marginal_table,
    marginalize,
    verify_marginal_heat,
)
from permflow.lattice import build_lattice, heat_kernel
from permflow.pairings import OrderedPair, is_subsequence, neighbors_full, rank, unrank


def brute_group_generator(lat):
    """Dense generator built straight from neighbors_full and list lookups."""
    n = lat.n_vertices
    states = [OrderedPair.from_maps(range(n), p) for p in itertools.permutations(range(n))]
    pos = {o: i for i, o in enumerate(states)}
    Q = np.zeros((len(states), len(states)))
    for i, o in enumerate(states):
        for nb in neighbors_full(o, lat):
            Q[i, pos[nb]] += 1
            Q[i, i] -= 1
    return Q


def two_state(t):
    return (1 + math.exp(-2 * t)) / 2, (1 - math.exp(-2 * t)) / 2


@pytest.mark.parametrize("n", [2, 3, 4])
def test_initial_delta(n):
    C = initial_delta(n)
    assert C.t == 0
    assert C.values[0] == 1 and C.values.sum() == 1 and len(C.values) == math.factorial(n)


def test_initial_delta_needs_two_vertices():
    with pytest.raises(InvalidSpecError):
        initial_delta(1)


def test_generator_two_sites():
    assert generator_apply(initial_delta(2), build_lattice([2])).tolist() == [-1.0, 1.0]


@pytest.mark.parametrize("dims", [[2, 2], [3]])
def test_generator_matches_brute_force(dims):
    lat = build_lattice(dims)
    n = lat.n_vertices
    x = np.random.default_rng(1).random(math.factorial(n))
    C = DistributionTable(n, 0.0, x)
    assert np.allclose(generator_apply(C, lat), brute_group_generator(lat) @ x, atol=1e-14)


def test_generator_kills_constants_and_conserves():
    lat = build_lattice([2, 2])
    uniform = DistributionTable(4, 0.0, np.full(24, 1 / 24))
    assert np.abs(generator_apply(uniform, lat)).max() <= 1e-16
    x = DistributionTable(4, 0.0, np.random.default_rng(2).random(24))
    assert abs(generator_apply(x, lat).sum()) < 1e-14


@pytest.mark.parametrize("method", ["exact-spectral", "ode"])
@pytest.mark.parametrize("t", [0.1, 0.5, 1.0, 2.0])
def test_two_state_closed_form(method, t):
    C = evolve(initial_delta(2), build_lattice([2]), t, method)
    ident, swap = two_state(t)
    assert C.values[0] == pytest.approx(ident, abs=1e-9)
    assert C.values[1] == pytest.approx(swap, abs=1e-9)
    assert C.t == t


def test_zero_time_is_identity_map():
    C0 = DistributionTable(3, 0.0, np.arange(6) / 15)
    assert np.array_equal(evolve(C0, build_lattice([3]), 0.0).values, C0.values)


def test_square_against_dense_expm():
    lat = build_lattice([2, 2])
    ref = scipy.linalg.expm(brute_group_generator(lat))[0]  # row of the identity; generator symmetric
    assert np.abs(evolve(initial_delta(4), lat, 1.0).values - ref).max() <= 1e-10


def test_size_caps(monkeypatch):
    lat = build_lattice([2, 4])
    with pytest.raises(StateSpaceTooLarge):
        evolve(initial_delta(8), lat, 1.0, "exact-spectral")
    with pytest.raises(StateSpaceTooLarge):
        evolve(initial_delta(4), build_lattice([2, 2]), 1.0, "ode", cap=10)
    monkeypatch.setenv("PERMFLOW_CAP_FACTORIAL", "10")
    with pytest.raises(StateSpaceTooLarge):
        evolve(initial_delta(4), build_lattice([2, 2]), 1.0)


@pytest.mark.parametrize("dims", [[2, 2], [2, 3], [3]])
def test_mass_and_inversion_symmetry(dims):
    lat = build_lattice(dims)
    n = lat.n_vertices
    inv = inverse_ranks(n)
    for t in (0.3, 1.0, 2.0):
        C = evolve(initial_delta(n), lat, t)
        assert abs(C.values.sum() - 1) <= 1e-9
        assert np.abs(C.values - C.values[inv]).max() <= 1e-10
        assert C.values.min() >= -1e-12


def test_inverse_ranks_small():
    inv = inverse_ranks(3)
    for r in range(6):
        p = unrank(r, 3).dst
        q = [0] * 3
        for i, v in enumerate(p):
            q[v] = i
        assert inv[r] == rank(OrderedPair.from_maps(range(3), q))


def test_long_time_uniform():
    C = evolve(initial_delta(4), build_lattice([2, 2]), 50.0)
    assert np.abs(C.values - 1 / 24).max() <= 1e-8


def test_marginalize_examples():
    lat = build_lattice([2])
    C = evolve(initial_delta(2), lat, 0.5)
    assert marginalize(C, OrderedPair.from_text("0>0")) == pytest.approx(two_state(0.5)[0], abs=1e-12)
    full = unrank(3, 3)
    C3 = evolve(initial_delta(3), build_lattice([3]), 0.7)
    assert marginalize(C3, full) == C3[full]


def test_marginal_table_matches_literal_scan():
    lat = build_lattice([2, 2])
    C = evolve(initial_delta(4), lat, 0.8)
    states = list(C.items())
    for S in [(0,), (1, 3), (0, 1, 2), (0, 1, 2, 3)]:
        m = marginal_table(C, S)
        assert len(m.values) == math.perm(4, len(S))
        for o, v in m.items():
            literal = sum(c for s, c in states if is_subsequence(o, s))
            assert v == pytest.approx(literal, abs=1e-15)
            assert marginalize(C, o) == pytest.approx(v, abs=1e-15)
        assert m.values.sum() == pytest.approx(1.0, abs=1e-12)


def test_marginal_generator_single_site_is_lattice_generator():
    lat = build_lattice([2, 3])
    C = evolve(initial_delta(6), lat, 0.4)
    m = marginal_table(C, [2])
    assert np.allclose(marginal_generator_apply(m, lat), lat.laplacian_generator @ m.values, atol=1e-15)


def test_marginal_generator_full_set_is_group_generator():
    lat = build_lattice([2, 2])
    C = evolve(initial_delta(4), lat, 0.4)
    m = marginal_table(C, range(4))
    assert np.array_equal(marginal_generator_apply(m, lat), generator_apply(C, lat))


def test_marginal_generator_uniform_is_zero():
    lat = build_lattice([2, 3])
    C = DistributionTable(6, 0.0, np.full(720, 1 / 720))
    m = marginal_table(C, [0, 5])
    assert np.abs(marginal_generator_apply(m, lat)).max() <= 1e-15


def test_single_site_marginal_equals_kernel():
    lat = build_lattice([2, 2])
    for t in (0.5, 1.0):
        C = evolve(initial_delta(4), lat, t)
        g = heat_kernel(lat, t).g
        for i in range(4):
            m = marginal_table(C, [i])
            for j in range(4):
                assert m[OrderedPair(((i, j),))] == pytest.approx(g[j, i], abs=1e-8)


@pytest.mark.parametrize(
    "dims, S, t, tol",
    [([2, 2], (1,), 1.0, 1e-7), ([2, 2], (0, 1, 2, 3), 1.0, 1e-10), ([2, 3], (0, 4), 0.5, 1e-7)],
)
def test_verify_marginal_heat_examples(dims, S, t, tol):
    assert verify_marginal_heat(build_lattice(dims), S, t) <= tol


def test_marginal_heat_every_subset_n_le_6():
    for dims in ([2, 2], [5], [2, 3]):
        lat = build_lattice(dims)
        n = lat.n_vertices
        for k in range(1, n + 1):
            for S in itertools.combinations(range(n), k):
                assert verify_marginal_heat(lat, S, 0.6) <= 1e-7


def test_marginal_heat_ode_route():
    lat = build_lattice([2, 2])
    assert verify_marginal_heat(lat, (0, 3), 1.0, method="ode") <= 1e-7


def test_marginal_heat_from_random_start():
    lat = build_lattice([2, 2])
    x = np.random.default_rng(7).random(24)
    C0 = DistributionTable(4, 0.0, x / x.sum())
    assert verify_marginal_heat(lat, (1, 2), 0.9, C0=C0) <= 1e-7


def test_evolve_marginal_matches_dense_oracle():
    lat = build_lattice([2, 2])
    m0 = marginal_table(initial_delta(4), [0, 3])
    keys = m0.keys()
    pos = {o: i for i, o in enumerate(keys)}
    from permflow.pairings import neighbors_partial

    Q = np.zeros((len(keys), len(keys)))
    for i, o in enumerate(keys):
        for nb in neighbors_partial(o, lat):
            Q[i, pos[nb]] += 1
            Q[i, i] -= 1
    ref = scipy.linalg.expm(0.7 * Q) @ m0.values
    assert np.abs(evolve_marginal(m0, lat, 0.7).values - ref).max() <= 1e-12


@pytest.mark.slow
def test_chain8_mass_ode():
    C = evolve(initial_delta(8), build_lattice([8]), 2.0, "ode")
    assert abs(C.values.sum() - 1) <= 1e-7
