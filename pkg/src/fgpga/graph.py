"""Problem instances, the cut-cost objective and the capacity constraint.

The application graph holds component demands and communication weights,
the machine graph holds capacities and a dense link-cost matrix.  An
:class:`Assignment` maps every component to a machine and caches per-machine
loads and the cut cost so that search loops can evaluate single-vertex moves
without a full recomputation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Loads are maintained incrementally, so the capacity test tolerates
# float drift of this relative size.
FEASIBILITY_RTOL = 1e-9


class ApplicationGraph:
    """Undirected component graph with vertex demands and edge weights."""

    def __init__(self, demands, edges):
        demands = np.asarray(demands, dtype=np.float64)
        if demands.ndim != 1 or demands.size == 0:
            raise ValueError("demands must be a non-empty 1-d sequence")
        if not np.all(np.isfinite(demands)) or np.any(demands < 0):
            raise ValueError("demands must be finite and non-negative")
        n = demands.size

        edges = list(edges)
        src = np.empty(len(edges), dtype=np.int64)
        dst = np.empty(len(edges), dtype=np.int64)
        weight = np.empty(len(edges), dtype=np.float64)
        seen = set()
        for e, (i, j, w) in enumerate(edges):
            i, j, w = int(i), int(j), float(w)
            if not 0 <= i < j < n:
                raise ValueError(f"edge ({i}, {j}) violates 0 <= i < j < {n}")
            if (i, j) in seen:
                raise ValueError(f"duplicate edge ({i}, {j})")
            if not (w > 0 and np.isfinite(w)):
                raise ValueError(f"edge ({i}, {j}) has non-positive weight {w}")
            seen.add((i, j))
            src[e], dst[e], weight[e] = i, j, w

        self.demands = demands
        self.src = src
        self.dst = dst
        self.weight = weight

        # CSR adjacency: neighbours of v are nbr[ptr[v]:ptr[v+1]]
        ends = np.concatenate([src, dst])
        others = np.concatenate([dst, src])
        ws = np.concatenate([weight, weight])
        order = np.argsort(ends, kind="stable")
        self.adj_ptr = np.concatenate([[0], np.cumsum(np.bincount(ends, minlength=n))])
        self.adj_nbr = others[order]
        self.adj_w = ws[order]

        for arr in (self.demands, self.src, self.dst, self.weight,
                    self.adj_ptr, self.adj_nbr, self.adj_w):
            arr.flags.writeable = False

    @property
    def vertex_count(self) -> int:
        return self.demands.size

    @property
    def edge_count(self) -> int:
        return self.weight.size

    @property
    def edges(self) -> list[tuple[int, int, float]]:
        return [(int(i), int(j), float(w))
                for i, j, w in zip(self.src, self.dst, self.weight)]

    def neighbors(self, v: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.adj_ptr[v], self.adj_ptr[v + 1]
        return self.adj_nbr[lo:hi], self.adj_w[lo:hi]

    def degrees(self) -> np.ndarray:
        return np.diff(self.adj_ptr)


class MachineGraph:
    """Heterogeneous machines: capacities plus a dense symmetric link-cost matrix."""

    def __init__(self, capacities, link_cost):
        capacities = np.asarray(capacities, dtype=np.float64)
        if capacities.ndim != 1 or capacities.size == 0:
            raise ValueError("capacities must be a non-empty 1-d sequence")
        if not np.all(np.isfinite(capacities)) or np.any(capacities <= 0):
            raise ValueError("capacities must be finite and positive")
        m = capacities.size
        link_cost = np.array(link_cost, dtype=np.float64)
        if link_cost.shape != (m, m):
            raise ValueError(f"link_cost must be {m}x{m}, got {link_cost.shape}")
        if not np.all(np.isfinite(link_cost)) or np.any(link_cost < 0):
            raise ValueError("link costs must be finite and non-negative")
        if np.any(np.diag(link_cost) != 0):
            raise ValueError("link_cost diagonal must be zero")
        if not np.array_equal(link_cost, link_cost.T):
            raise ValueError("link_cost must be symmetric")
        self.capacities = capacities
        self.link_cost = link_cost
        # capacity test threshold; see FEASIBILITY_RTOL
        self.limits = capacities * (1.0 + FEASIBILITY_RTOL)
        for arr in (self.capacities, self.link_cost, self.limits):
            arr.flags.writeable = False

    @property
    def machine_count(self) -> int:
        return self.capacities.size


@dataclass(frozen=True)
class Instance:
    app: ApplicationGraph
    machines: MachineGraph
    name: str = "instance"

    @property
    def V(self) -> int:
        return self.app.vertex_count

    @property
    def Mn(self) -> int:
        return self.machines.machine_count


def _check_genes(app: ApplicationGraph, machines: MachineGraph, genes) -> np.ndarray:
    genes = np.asarray(genes)
    if genes.shape != (app.vertex_count,):
        raise ValueError(f"expected {app.vertex_count} genes, got shape {genes.shape}")
    if genes.size and (genes.min() < 0 or genes.max() >= machines.machine_count):
        raise ValueError(f"gene values must lie in [0, {machines.machine_count})")
    return genes.astype(np.int64, copy=False)


def _cut_cost(app, machines, genes) -> float:
    # the zero diagonal of link_cost drops co-located edges
    flat = genes[app.src] * machines.machine_count + genes[app.dst]
    return float(app.weight @ machines.link_cost.ravel()[flat])


def _loads(app, machines, genes) -> np.ndarray:
    # bincount accumulates in vertex-index order, so this is the canonical load
    return np.bincount(genes, weights=app.demands, minlength=machines.machine_count)


def cut_cost(app: ApplicationGraph, machines: MachineGraph, genes) -> float:
    """Sum of ``w_ij * b[g_i][g_j]`` over edges whose endpoints sit on different machines.

    Each undirected edge contributes once.
    """
    return _cut_cost(app, machines, _check_genes(app, machines, genes))


def machine_loads(app: ApplicationGraph, machines: MachineGraph, genes) -> np.ndarray:
    return _loads(app, machines, _check_genes(app, machines, genes))


def is_feasible(app: ApplicationGraph, machines: MachineGraph, genes) -> bool:
    """True iff no machine's summed demand exceeds its capacity."""
    return bool(np.all(machine_loads(app, machines, genes) <= machines.limits))


@dataclass
class Assignment:
    """A genotype with cached machine loads and cut cost.

    Mutable; owned by one search loop at a time.  Use :meth:`copy` before
    handing it to another owner.
    """

    genes: np.ndarray
    loads: np.ndarray
    cost: float

    @classmethod
    def from_genes(cls, instance: Instance, genes) -> "Assignment":
        genes = _check_genes(instance.app, instance.machines, genes).copy()
        return cls._trusted(instance, genes)

    @classmethod
    def _trusted(cls, instance: Instance, genes: np.ndarray) -> "Assignment":
        # genes already validated and owned by the caller
        return cls(genes, _loads(instance.app, instance.machines, genes),
                   _cut_cost(instance.app, instance.machines, genes))

    def copy(self) -> "Assignment":
        return Assignment(self.genes.copy(), self.loads.copy(), self.cost)

    def refresh(self, instance: Instance) -> None:
        """Recompute both caches from scratch."""
        self.loads = _loads(instance.app, instance.machines, self.genes)
        self.cost = _cut_cost(instance.app, instance.machines, self.genes)

    def is_feasible(self, instance: Instance) -> bool:
        """From-scratch check; ignores the cached loads."""
        return is_feasible(instance.app, instance.machines, self.genes)

    def within_capacity(self, instance: Instance) -> bool:
        """Check against the cached loads."""
        return bool(np.all(self.loads <= instance.machines.limits))

    def __len__(self) -> int:
        return self.genes.size


def move_deltas(app: ApplicationGraph, machines: MachineGraph,
                genes: np.ndarray, vertex: int) -> np.ndarray:
    """Cost change of moving ``vertex`` to each machine, as a length-Mn vector.

    Only edges incident to ``vertex`` are touched.  The entry for the
    vertex's current machine is exactly zero.
    """
    nbr, w = app.neighbors(vertex)
    b = machines.link_cost
    # per-machine cost of all incident edges if vertex sat there
    incident = b[:, genes[nbr]] @ w
    return incident - incident[genes[vertex]]


def delta_cost(app: ApplicationGraph, machines: MachineGraph, assignment: Assignment,
               vertex: int, new_machine: int) -> float:
    """Cost change if ``vertex`` moved to ``new_machine``; the assignment is not touched."""
    genes = assignment.genes
    old = genes[vertex]
    if old == new_machine:
        return 0.0
    nbr, w = app.neighbors(vertex)
    gn = genes[nbr]
    b = machines.link_cost
    return float(np.sum(w * (b[new_machine, gn] - b[old, gn])))


def apply_move(instance: Instance, assignment: Assignment, vertex: int,
               new_machine: int, delta: float | None = None) -> Assignment:
    """Move ``vertex`` to ``new_machine`` in place, keeping caches coherent.

    Capacity is not checked; callers enforce it.  ``delta`` may be passed
    when the caller already computed it.
    """
    old = int(assignment.genes[vertex])
    if old == new_machine:
        return assignment
    if delta is None:
        delta = delta_cost(instance.app, instance.machines, assignment, vertex, new_machine)
    r = instance.app.demands[vertex]
    assignment.loads[old] -= r
    assignment.loads[new_machine] += r
    assignment.genes[vertex] = new_machine
    assignment.cost += delta
    return assignment
