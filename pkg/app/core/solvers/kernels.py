"""Inner loops of the heuristic QUBO solvers.

The pure-Python versions are always defined; when numba is importable they
are compiled with ``njit`` and exported under the same names.
"""

import numpy as np

try:
    from numba import njit

    JIT_AVAILABLE = True
except ImportError:
    JIT_AVAILABLE = False


def _local_fields(q, x):
    n = x.shape[0]
    g = np.zeros(n)
    for i in range(n):
        acc = 0.0
        for j in range(n):
            acc += q[i, j] * x[j]
        g[i] = acc
    return g


def _flip(q, x, g, i):
    d = 1.0 - 2.0 * x[i]
    x[i] += d
    for j in range(x.shape[0]):
        g[j] += d * q[j, i]


def _anneal_chain(q, x, betas, uniforms):
    """Sequential single-flip Metropolis sweeps; returns the best state seen and its energy."""
    n = x.shape[0]
    g = _local_fields(q, x)
    energy = 0.0
    for i in range(n):
        energy += x[i] * g[i]
    best_energy = energy
    best_x = x.copy()
    for s in range(betas.shape[0]):
        beta = betas[s]
        for i in range(n):
            delta = q[i, i] + 2.0 * (1.0 - 2.0 * x[i]) * g[i]
            if delta <= 0.0 or uniforms[s, i] < np.exp(-beta * delta):
                _flip(q, x, g, i)
                energy += delta
                if energy < best_energy:
                    best_energy = energy
                    best_x[:] = x
    return best_x, best_energy


def _tabu_walk(q, x, tenure, max_moves):
    """Steepest single-flip descent with a tabu list and aspiration."""
    n = x.shape[0]
    g = _local_fields(q, x)
    energy = 0.0
    for i in range(n):
        energy += x[i] * g[i]
    best_energy = energy
    best_x = x.copy()
    tabu_until = np.zeros(n, dtype=np.int64)
    for move in range(max_moves):
        pick = -1
        pick_delta = np.inf
        for i in range(n):
            delta = q[i, i] + 2.0 * (1.0 - 2.0 * x[i]) * g[i]
            if tabu_until[i] > move and not energy + delta < best_energy:
                continue
            if delta < pick_delta:
                pick = i
                pick_delta = delta
        if pick < 0:
            # everything is tabu: release the oldest entry
            pick = 0
            for i in range(1, n):
                if tabu_until[i] < tabu_until[pick]:
                    pick = i
            pick_delta = q[pick, pick] + 2.0 * (1.0 - 2.0 * x[pick]) * g[pick]
        _flip(q, x, g, pick)
        energy += pick_delta
        tabu_until[pick] = move + 1 + tenure
        if energy < best_energy:
            best_energy = energy
            best_x[:] = x
    return best_x, best_energy


if JIT_AVAILABLE:
    _local_fields = njit(cache=True, nogil=True)(_local_fields)
    _flip = njit(cache=True, nogil=True)(_flip)
    anneal_chain = njit(cache=True, nogil=True)(_anneal_chain)
    tabu_walk = njit(cache=True, nogil=True)(_tabu_walk)
else:
    anneal_chain = _anneal_chain
    tabu_walk = _tabu_walk


__all__ = ["JIT_AVAILABLE", "anneal_chain", "tabu_walk"]
