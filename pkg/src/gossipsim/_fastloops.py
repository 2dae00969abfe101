"""Jitted inner loops for the gossip runners.

Each loop mirrors the corresponding pure-Python step function exactly
(same expressions, same evaluation order), and the test suite pins
bitwise equality between the two paths.  Keep them in sync.
"""

import numpy as np
from numba import njit


@njit(cache=True)
def localization_loop(
    x, kappa, xtilde, edge_i, edge_j, meas, gamma, draws,
    win_from, wsum_x, wsq_x, wsum_t, wsq_t, hist, record,
):
    n = x.shape[0]
    for t in range(draws.shape[0]):
        e = draws[t]
        i = edge_i[e]
        j = edge_j[e]
        b = meas[e]
        xi = x[i]
        xj = x[j]
        x[i] = (1.0 - gamma) * xi + gamma * xj + gamma * b
        x[j] = (1.0 - gamma) * xj + gamma * xi - gamma * b
        kappa[i] += 1
        kappa[j] += 1
        xtilde[i] = ((kappa[i] - 1) * xtilde[i] + x[i]) / kappa[i]
        xtilde[j] = ((kappa[j] - 1) * xtilde[j] + x[j]) / kappa[j]
        if t >= win_from:
            for h in range(n):
                wsum_x[h] += x[h]
                wsq_x[h] += x[h] * x[h]
                wsum_t[h] += xtilde[h]
                wsq_t[h] += xtilde[h] * xtilde[h]
        if record:
            for h in range(n):
                hist[t, h] = x[h]


@njit(cache=True)
def pagerank_loop(x, xbar, out_deg, edge_i, edge_j, draws, r, count0):
    n = x.shape[0]
    omr = 1.0 - r
    leak = r / n
    c = count0
    for t in range(draws.shape[0]):
        e = draws[t]
        i = edge_i[e]
        j = edge_j[e]
        d = omr * (x[i] / out_deg[i])
        for h in range(n):
            x[h] = omr * x[h] + leak
        x[i] -= d
        x[j] += d
        for h in range(n):
            xbar[h] = (xbar[h] * c + x[h]) / (c + 1.0)
        c += 1.0
    return c


@njit(cache=True)
def opinions_loop(x, xbar, edge_i, edge_j, edge_mix, openness, prejudices, draws, count0):
    n = x.shape[0]
    c = count0
    for t in range(draws.shape[0]):
        e = draws[t]
        i = edge_i[e]
        g = edge_mix[e]
        hi = openness[i]
        x[i] = hi * ((1.0 - g) * x[i] + g * x[edge_j[e]]) + (1.0 - hi) * prejudices[i]
        for h in range(n):
            xbar[h] = (xbar[h] * c + x[h]) / (c + 1.0)
        c += 1.0
    return c


def _as_index_array(values) -> np.ndarray:
    return np.ascontiguousarray(values, dtype=np.int64)
