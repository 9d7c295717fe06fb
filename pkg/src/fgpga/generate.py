"""Random benchmark instances.

Application graphs grow by degree-preferential attachment (an endpoint of a
uniformly drawn edge is picked with probability proportional to its degree),
giving sparse connected graphs with a power-law degree tail.  Vertex demands
and edge weights are exponential.  Machines are added with capacities drawn
from a fixed menu until the fleet holds 1.5 times the total demand; their
sparse link graph is closed under shortest paths to give a dense cost matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .graph import ApplicationGraph, Instance, MachineGraph

DEFAULT_CAPACITIES = tuple(float(c) for c in range(100, 801, 100))


@dataclass
class GenParams:
    vertex_count: int
    vertex_weight_lambda: float = 0.1
    edge_weight_lambda: float = 0.005
    capacity_headroom: float = 1.5
    capacity_choices: tuple[float, ...] = field(default=DEFAULT_CAPACITIES)
    machine_link_lambda: float = 0.005
    power_law_exponent: float = 2.5
    target_edge_factor: float = 2.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.vertex_count < 2:
            raise ValueError("vertex_count must be at least 2")
        if self.capacity_headroom <= 1:
            raise ValueError("capacity_headroom must exceed 1")
        if not self.capacity_choices or min(self.capacity_choices) <= 0:
            raise ValueError("capacity_choices must be positive")
        for name in ("vertex_weight_lambda", "edge_weight_lambda",
                     "machine_link_lambda", "target_edge_factor"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


def exponential(rng: np.random.Generator, rate: float) -> float:
    # inverse CDF with u in (0, 1]
    return -math.log(1.0 - rng.random()) / rate


def _positive_exponential(rng, rate):
    while True:
        x = exponential(rng, rate)
        if x > 0:
            return x


def _preferential_edges(n: int, edge_target: int, rng: np.random.Generator):
    """Grow a connected graph on ``n`` vertices with about ``edge_target`` edges.

    Starts from a clique on (up to) three vertices, then interleaves two
    step kinds in random order: attach a new vertex to a degree-biased
    endpoint, or join two degree-biased endpoints.  The step counts are
    fixed up front so the final edge count is exact unless the graph
    saturates.
    """
    seed = min(3, n)
    edges = [(i, j) for i in range(seed) for j in range(i + 1, seed)]
    present = set(edges)
    # flat endpoint list: a uniform pick is a degree-proportional vertex pick
    ends = [x for e in edges for x in e]

    vertex_steps = n - seed
    edge_steps = max(0, edge_target - len(edges) - vertex_steps)
    size = seed
    while vertex_steps or edge_steps:
        if rng.random() * (vertex_steps + edge_steps) < vertex_steps:
            target = ends[int(rng.integers(len(ends)))]
            new = (target, size)
            size += 1
            vertex_steps -= 1
        else:
            edge_steps -= 1
            new = None
            for _ in range(32):
                a = ends[int(rng.integers(len(ends)))]
                b = ends[int(rng.integers(len(ends)))]
                pair = (min(a, b), max(a, b))
                if a != b and pair not in present:
                    new = pair
                    break
            if new is None:
                continue
        edges.append(new)
        present.add(new)
        ends.extend(new)
    return edges


def generate_application_graph(params: GenParams, rng: np.random.Generator) -> ApplicationGraph:
    n = params.vertex_count
    edge_target = min(round(params.target_edge_factor * n), n * (n - 1) // 2)
    pairs = _preferential_edges(n, edge_target, rng)
    cap_max = max(params.capacity_choices)
    demands = []
    for _ in range(n):
        # a component larger than every machine would make the instance trivially infeasible
        while True:
            d = round(exponential(rng, params.vertex_weight_lambda), 3)
            if d <= cap_max:
                break
        demands.append(d)
    edges = sorted((i, j, _positive_exponential(rng, params.edge_weight_lambda))
                   for i, j in pairs)
    return ApplicationGraph(demands, edges)


def _machine_topology(m: int, rng: np.random.Generator):
    """Random recursive spanning tree plus ``ceil(m/2)`` extra distinct edges."""
    edges = [(int(rng.integers(k)), k) for k in range(1, m)]
    present = set(edges)
    possible = m * (m - 1) // 2
    for _ in range(math.ceil(m / 2)):
        if len(present) == possible:
            break
        while True:
            a, b = int(rng.integers(m)), int(rng.integers(m))
            pair = (min(a, b), max(a, b))
            if a != b and pair not in present:
                break
        edges.append(pair)
        present.add(pair)
    return edges


def densify(m: int, links) -> np.ndarray:
    """All-pairs shortest-path costs over a connected undirected link list."""
    if m == 1:
        return np.zeros((1, 1))
    rows = [a for a, b, _ in links]
    cols = [b for a, b, _ in links]
    data = [w for _, _, w in links]
    graph = csr_matrix((data, (rows, cols)), shape=(m, m))
    dist = shortest_path(graph, method="D", directed=False)
    if not np.all(np.isfinite(dist)):
        raise ValueError("machine link graph is disconnected")
    # reversed paths can differ in the last bit
    dist = np.minimum(dist, dist.T)
    np.fill_diagonal(dist, 0.0)
    return dist


def generate_machine_graph(app: ApplicationGraph, params: GenParams,
                           rng: np.random.Generator) -> MachineGraph:
    needed = params.capacity_headroom * float(np.sum(app.demands))
    largest = float(np.max(app.demands))
    choices = params.capacity_choices
    capacities = []
    while sum(capacities) < needed or not capacities or max(capacities) < largest:
        capacities.append(float(choices[int(rng.integers(len(choices)))]))
    m = len(capacities)
    links = [(a, b, _positive_exponential(rng, params.machine_link_lambda))
             for a, b in _machine_topology(m, rng)]
    return MachineGraph(capacities, densify(m, links))


def instance_name(vertex_count: int, seed: int) -> str:
    return f"pl{vertex_count:04d}_s{seed}"


def generate_instance(params: GenParams, name: str | None = None) -> Instance:
    rng = np.random.Generator(np.random.PCG64(params.rng_seed))
    app = generate_application_graph(params, rng)
    machines = generate_machine_graph(app, params, rng)
    return Instance(app, machines, name or instance_name(params.vertex_count, params.rng_seed))


def ladder_seed(seed: int, vertex_count: int) -> int:
    """Per-size seed for a ladder, independent of which other sizes are present."""
    return int(np.random.SeedSequence([seed, vertex_count]).generate_state(1, np.uint64)[0])


def generate_ladder(sizes, seed: int, **overrides) -> list[Instance]:
    out = []
    for v in sizes:
        params = GenParams(vertex_count=v, rng_seed=ladder_seed(seed, v), **overrides)
        out.append(generate_instance(params, name=instance_name(v, seed)))
    return out


def with_roomy_machine(instance: Instance, machine: int = 0) -> Instance:
    """Copy of ``instance`` whose chosen machine can host every component at once."""
    caps = instance.machines.capacities.copy()
    caps[machine] = max(caps[machine], float(np.sum(instance.app.demands)))
    return Instance(instance.app, MachineGraph(caps, instance.machines.link_cost),
                    f"{instance.name}_roomy")


def tiny_instance(vertex_count: int, machine_count: int, rng: np.random.Generator,
                  edge_probability: float = 0.5, slack: float = 1.3,
                  name: str = "tiny") -> Instance:
    """Small dense-ish instance with tight capacities, for exhaustive checks.

    Capacities share ``slack`` times the total demand at random, then each
    is raised to fit the largest component so placement is always possible
    for at least one machine.
    """
    demands = np.round(rng.uniform(1.0, 10.0, size=vertex_count), 3)
    edges = []
    for i in range(vertex_count):
        for j in range(i + 1, vertex_count):
            if rng.random() < edge_probability:
                edges.append((i, j, round(float(rng.uniform(1.0, 100.0)), 3)))
    if not edges and vertex_count >= 2:
        edges.append((0, 1, 1.0))
    share = rng.dirichlet(np.ones(machine_count))
    caps = np.maximum(np.round(slack * demands.sum() * share, 3), demands.max())
    links = np.triu(np.round(rng.uniform(1.0, 10.0, size=(machine_count, machine_count)), 3), 1)
    links = links + links.T
    return Instance(ApplicationGraph(demands, edges), MachineGraph(caps, links), name)
