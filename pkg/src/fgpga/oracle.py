"""Exact optimum by exhaustive enumeration, for tiny instances only."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import FEASIBILITY_RTOL, Instance

DEFAULT_STATE_BUDGET = 10**8


class BudgetExceeded(ValueError):
    """The instance has more states than the caller allowed."""


@dataclass
class OracleResult:
    optimal_cost: float | None  # None when no assignment is feasible
    optimal_genes: list[int] | None
    states_enumerated: int

    @property
    def feasible(self) -> bool:
        return self.optimal_cost is not None


def solve_exact(instance: Instance, state_budget: int = DEFAULT_STATE_BUDGET,
                chunk: int = 1 << 16) -> OracleResult:
    """Enumerate all ``Mn**V`` assignments and return the cheapest feasible one.

    States are visited in lexicographic order of their gene vectors, so
    among equal-cost optima the lexicographically smallest wins.
    """
    V, Mn = instance.V, instance.Mn
    total = Mn**V
    if total > state_budget:
        raise BudgetExceeded(f"{Mn}^{V} = {total} states exceeds budget {state_budget}")

    demands = instance.app.demands
    limit = instance.machines.capacities * (1.0 + FEASIBILITY_RTOL)
    b = instance.machines.link_cost
    edges = instance.app.edges
    place = Mn ** np.arange(V - 1, -1, -1, dtype=np.int64)

    best_cost, best_state = None, None
    for start in range(0, total, chunk):
        states = np.arange(start, min(total, start + chunk), dtype=np.int64)
        genes = (states[:, None] // place) % Mn
        loads = np.zeros((states.size, Mn))
        for v in range(V):
            loads[np.arange(states.size), genes[:, v]] += demands[v]
        ok = np.all(loads <= limit, axis=1)
        if not ok.any():
            continue
        cost = np.zeros(states.size)
        for i, j, w in edges:
            gi, gj = genes[:, i], genes[:, j]
            cost += np.where(gi != gj, w * b[gi, gj], 0.0)
        cost[~ok] = np.inf
        k = int(np.argmin(cost))
        if best_cost is None or cost[k] < best_cost:
            best_cost, best_state = float(cost[k]), genes[k].tolist()

    return OracleResult(best_cost, best_state, total)
