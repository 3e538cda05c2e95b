"""Matrix permanents: Ryser/Gray-code, brute force, and a Monte Carlo estimator."""
from __future__ import annotations

import itertools
import math

import numpy as np

from .errors import CapExceeded, InvalidSpecError

MAX_RYSER = 20


def permanent(m) -> float:
    """Exact permanent by Ryser's inclusion-exclusion, one column toggled per Gray-code step.

    Cost is O(2^n n).  Integer-valued inputs are summed exactly.
    """
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidSpecError(f"permanent needs a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if n == 0:
        return 1.0
    if n > MAX_RYSER:
        raise CapExceeded(f"Ryser permanent limited to n <= {MAX_RYSER}, got {n}")
    cols = [a[:, j].copy() for j in range(n)]
    row_sums = np.zeros(n)
    total = 0.0
    gray = 0
    for k in range(1, 1 << n):
        j = (k & -k).bit_length() - 1
        gray ^= 1 << j
        if gray >> j & 1:
            row_sums += cols[j]
        else:
            row_sums -= cols[j]
        term = float(np.prod(row_sums))
        total += -term if bin(gray).count("1") & 1 else term
    return -total if n & 1 else total


def permanent_naive(m) -> float:
    """Sum over all n! permutations; reference only (n <= 8)."""
    a = np.asarray(m, dtype=float)
    n = a.shape[0]
    if n > 8:
        raise CapExceeded(f"naive permanent limited to n <= 8, got {n}")
    rows = range(n)
    return float(sum(math.prod(a[i, p[i]] for i in rows) for p in itertools.permutations(rows)))


def mc_estimate_permanent(g, samples: int, seed: int, chunk: int = 100_000) -> tuple[float, float]:
    """Unbiased estimate ``N! * mean(prod_i g[i, p(i)])`` over uniform random permutations.

    Returns ``(estimate, standard_error)``.  The same ``seed`` gives the same
    numbers bit for bit.
    """
    a = np.asarray(getattr(g, "g", g), dtype=float)
    n = a.shape[0]
    samples = int(samples)
    if samples < 1:
        raise InvalidSpecError("need at least one sample")
    rng = np.random.default_rng(seed)
    rows = np.arange(n)
    draws = []
    remaining = samples
    while remaining:
        size = min(chunk, remaining)
        perms = rng.permuted(np.tile(rows, (size, 1)), axis=1)
        draws.append(a[rows, perms].prod(axis=1))
        remaining -= size
    vals = np.concatenate(draws)
    scale = math.factorial(n)
    estimate = scale * float(vals.mean())
    if samples == 1:
        return estimate, math.inf
    stderr = scale * float(vals.std(ddof=1)) / math.sqrt(samples)
    return estimate, stderr
