"""Compiled inner loops."""

import numpy as np
from numba import njit


@njit(cache=True)
def greedy_sweep(genes, loads, demands, limits, adj_ptr, adj_nbr, adj_w, link_cost, start):
    """Visit every gene once, from ``start`` with wrap-around, moving each to its
    cheapest machine with room.  Ties go to the lowest machine index.

    Updates ``genes`` and ``loads`` in place and returns the total cost change.
    """
    V = genes.size
    Mn = loads.size
    incident = np.empty(Mn)
    total = 0.0
    for step in range(V):
        v = (start + step) % V
        cur = genes[v]
        incident[:] = 0.0
        for e in range(adj_ptr[v], adj_ptr[v + 1]):
            row = genes[adj_nbr[e]]
            w = adj_w[e]
            for m in range(Mn):
                incident[m] += w * link_cost[row, m]
        r = demands[v]
        base = incident[cur]
        best = cur
        best_delta = 0.0
        for m in range(Mn):
            if m == cur:
                continue
            d = incident[m] - base
            if d < best_delta or (d == best_delta and m < best):
                if loads[m] + r <= limits[m]:
                    best = m
                    best_delta = d
        if best != cur:
            loads[cur] -= r
            loads[best] += r
            genes[v] = best
            total += best_delta
    return total

