"""Time propagation for symmetric conservative generators.

Two routes, used by the lattice kernel, the group walk, the marginal tables
and the subset functions alike:

* ``spectral``: dense ``eigh`` of the generator, then ``V exp(w t) V^T x``.
* ``rk4``: classical fixed-step Runge-Kutta with step
  ``h = min(0.01, 0.1 / max|diag Q|)``; ``max|diag Q|`` is the largest degree.
"""
from __future__ import annotations

import math

import numpy as np
import scipy.linalg
import scipy.sparse


def eigendecompose(Q) -> tuple[np.ndarray, np.ndarray]:
    if scipy.sparse.issparse(Q):
        Q = Q.toarray()
    w, V = scipy.linalg.eigh(Q)
    return w, V


def spectral_propagate(eig: tuple[np.ndarray, np.ndarray], x0: np.ndarray, t: float) -> np.ndarray:
    """Apply ``exp(Q t)`` to a vector or to the columns of a matrix."""
    w, V = eig
    coeffs = V.T @ x0
    scale = np.exp(w * t)
    if coeffs.ndim == 1:
        return V @ (scale * coeffs)
    return V @ (scale[:, None] * coeffs)


def rk4_step_size(Q) -> float:
    max_deg = float(np.max(np.abs(Q.diagonal()))) if Q.shape[0] else 0.0
    if max_deg == 0.0:
        return 0.01
    return min(0.01, 0.1 / max_deg)


def rk4_propagate(Q, x0: np.ndarray, t: float) -> np.ndarray:
    if t == 0:
        return np.array(x0, dtype=float, copy=True)
    n_steps = max(1, math.ceil(t / rk4_step_size(Q) - 1e-9))
    h = t / n_steps
    x = np.array(x0, dtype=float, copy=True)
    for _ in range(n_steps):
        k1 = Q @ x
        k2 = Q @ (x + 0.5 * h * k1)
        k3 = Q @ (x + 0.5 * h * k2)
        k4 = Q @ (x + h * k3)
        x = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return x
