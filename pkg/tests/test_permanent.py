import math

import numpy as np
import pytest

from permflow.errors import CapExceeded
from permflow.lattice import build_lattice, heat_kernel
from permflow.permanent import mc_estimate_permanent, permanent, permanent_naive


def test_examples():
    assert permanent(np.eye(5)) == 1.0
    assert permanent(np.ones((2, 2))) == 2.0
    assert abs(permanent(np.full((3, 3), 1 / 3)) - 2 / 9) <= 1e-15
    assert permanent(np.zeros((0, 0))) == 1.0


@pytest.mark.parametrize("seed", range(12))
def test_ryser_vs_naive_signed(seed):
    rng = np.random.default_rng(seed)
    n = 1 + seed % 6
    m = rng.uniform(-1, 1, (n, n))
    scale = permanent_naive(np.abs(m))
    assert abs(permanent(m) - permanent_naive(m)) <= 1e-12 * scale


def test_uniform_matrix_is_factorial_ratio():
    for n in range(1, 9):
        assert permanent(np.full((n, n), 1 / n)) == pytest.approx(math.factorial(n) / n**n, rel=1e-12)


def test_cap():
    with pytest.raises(CapExceeded):
        permanent(np.ones((21, 21)))


def test_mc_identity_variance():
    # only the identity draw is nonzero: per-sample variance of N! X is N! - 1
    n, samples = 4, 20_000
    est, se = mc_estimate_permanent(np.eye(n), samples, seed=3)
    analytic = math.sqrt((math.factorial(n) - 1) / samples)
    assert se == pytest.approx(analytic, rel=0.15)
    assert abs(est - 1.0) <= 4 * analytic


def test_mc_deterministic():
    g = heat_kernel(build_lattice([2, 2]), 0.7).g
    assert mc_estimate_permanent(g, 5000, 11) == mc_estimate_permanent(g, 5000, 11)
    assert mc_estimate_permanent(g, 5000, 11) != mc_estimate_permanent(g, 5000, 12)


def test_mc_chunking_does_not_change_mean_much():
    g = heat_kernel(build_lattice([2, 2]), 50.0).g
    est, se = mc_estimate_permanent(g, 100_000, 0)
    assert abs(est - 24 / 256) <= 3 * se + 1e-12


@pytest.mark.parametrize("dims", [[2, 2], [2, 3], [5]])
def test_mc_within_four_se(dims):
    g = heat_kernel(build_lattice(dims), 0.8).g
    exact = permanent(g)
    hits = 0
    for seed in range(10):
        est, se = mc_estimate_permanent(g, 20_000, seed)
        hits += abs(est - exact) <= 4 * se
    assert hits >= 9
