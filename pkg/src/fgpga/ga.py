"""Feasibility-preserving genetic algorithm for capacitated graph partitioning.

Every individual the algorithm ever holds satisfies the capacity constraint:
initialization only places a component on a machine with room for it,
crossover retries cut points until a feasible child appears, and both
mutation operators only commit capacity-respecting moves.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np

from ._kernels import greedy_sweep
from .graph import Assignment, Instance, apply_move, move_deltas
from .report import GenerationRecord, RunReport

# Guards the relative-improvement test on zero-cost plateaus.
STAGNATION_EPS = 1e-12


class InitializationError(RuntimeError):
    """Randomized initialization could not place every component.

    This does not prove the instance infeasible; it only means random
    placement kept failing.
    """


def generations_for(vertex_count: int) -> int:
    return 6000 if vertex_count <= 500 else 3000


@dataclass
class GaParams:
    population_size: int = 20
    max_generations: int | None = None
    similarity_threshold: float = 0.95
    random_restart_interval: int = 50
    twin_removal_interval: int = 100
    tournament_size: int = 5
    greedy_mutation_rate: float = 0.8
    improvement_threshold: float = 0.001
    restart_fraction: float = 0.5
    init_attempt_limit: int | None = None
    rng_seed: int = 0
    stop_at_zero: bool = True
    # "sweep": every gene in turn; "gene": one random gene, r draws with replacement
    greedy_scope: str = "sweep"

    def __post_init__(self):
        if self.population_size < 1:
            raise ValueError("population_size must be positive")
        if not 1 <= self.tournament_size <= self.population_size:
            raise ValueError("tournament_size must lie in [1, population_size]")
        if self.max_generations is not None and self.max_generations < 1:
            raise ValueError("max_generations must be positive")
        if not 0 < self.similarity_threshold <= 1:
            raise ValueError("similarity_threshold must lie in (0, 1]")
        if not 0 <= self.greedy_mutation_rate <= 1:
            raise ValueError("greedy_mutation_rate must lie in [0, 1]")
        if not 0 < self.restart_fraction < 1:
            raise ValueError("restart_fraction must lie in (0, 1)")
        if self.improvement_threshold < 0:
            raise ValueError("improvement_threshold must be non-negative")
        if self.random_restart_interval < 1 or self.twin_removal_interval < 1:
            raise ValueError("intervals must be positive")
        if self.greedy_scope not in ("sweep", "gene"):
            raise ValueError("greedy_scope must be 'sweep' or 'gene'")

    def generations(self, vertex_count: int) -> int:
        if self.max_generations is not None:
            return self.max_generations
        return generations_for(vertex_count)

    def attempt_limit(self, machine_count: int) -> int:
        if self.init_attempt_limit is not None:
            return self.init_attempt_limit
        return 100 * machine_count


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def initialize_individual(instance: Instance, params: GaParams | None,
                          rng: np.random.Generator) -> Assignment:
    """Place components one by one on uniformly drawn machines with enough free capacity.

    A component that finds no room within the per-gene attempt limit
    restarts the whole individual.  After ``10 * population_size`` such
    restarts :class:`InitializationError` is raised.
    """
    params = params or GaParams()
    V, Mn = instance.V, instance.Mn
    demands = instance.app.demands.tolist()
    limits = instance.machines.limits.tolist()
    per_gene = params.attempt_limit(Mn)

    buf = rng.integers(0, Mn, size=max(64, 2 * V)).tolist()
    pos = 0
    for _ in range(10 * params.population_size):
        loads = [0.0] * Mn
        genes = [0] * V
        for i in range(V):
            r = demands[i]
            for _ in range(per_gene):
                if pos == len(buf):
                    buf = rng.integers(0, Mn, size=len(buf)).tolist()
                    pos = 0
                m = buf[pos]
                pos += 1
                if loads[m] + r <= limits[m]:
                    loads[m] += r
                    genes[i] = m
                    break
            else:
                break
        else:
            return Assignment._trusted(instance, np.array(genes, dtype=np.int64))
    raise InitializationError(
        f"{instance.name}: random initialization failed "
        f"{10 * params.population_size} times")


def tournament_select(population: Sequence[Assignment], k: int, rng: np.random.Generator,
                      costs: np.ndarray | None = None) -> tuple[Assignment, Assignment]:
    """Two independent tournaments, each the cheapest of ``k`` distinct individuals."""
    n = len(population)
    if not 1 <= k <= n:
        raise ValueError(f"tournament size {k} outside [1, {n}]")
    if costs is None:
        costs = np.array([ind.cost for ind in population])

    def one():
        entrants = rng.permutation(n)[:k]
        return population[entrants[np.argmin(costs[entrants])]]

    return one(), one()


def _cut_screen(p1: Assignment, p2: Assignment, instance: Instance):
    """Which cut points can yield a feasible child.

    Only positions where the parents differ change the children's loads, so
    cut points are grouped by how many differing positions precede them.
    Returns ``(differing positions, ok1, ok2)`` where ``ok*[c]`` covers cuts
    preceded by exactly ``c`` differing positions.
    """
    demands = instance.app.demands
    Mn = instance.Mn
    diff_at = np.flatnonzero(p1.genes != p2.genes)
    delta = np.zeros((diff_at.size, Mn))
    rows = np.arange(diff_at.size)
    delta[rows, p1.genes[diff_at]] = demands[diff_at]
    delta[rows, p2.genes[diff_at]] -= demands[diff_at]
    # shift[c]: p1-head loads minus p2-head loads once c differing genes are in the head
    shift = np.zeros((diff_at.size + 1, Mn))
    np.cumsum(delta, axis=0, out=shift[1:])
    limits = instance.machines.limits
    ok1 = np.all(p2.loads + shift <= limits, axis=1)
    ok2 = np.all(p1.loads - shift <= limits, axis=1)
    return diff_at, ok1, ok2


def _children(p1: Assignment, p2: Assignment, k: int, instance: Instance):
    g1 = np.concatenate([p1.genes[:k], p2.genes[k:]])
    g2 = np.concatenate([p2.genes[:k], p1.genes[k:]])
    return Assignment._trusted(instance, g1), Assignment._trusted(instance, g2)


def crossover(parent1: Assignment, parent2: Assignment, instance: Instance,
              rng: np.random.Generator, cut: int | None = None) -> list[Assignment]:
    """One-point crossover returning the feasible children of the first workable cut.

    Up to V random cut points in ``[1, V-1]`` are tried.  The result holds
    one or two feasible children, or is empty when every attempt failed.
    Passing ``cut`` evaluates that single cut point only.
    """
    V = instance.V
    if cut is not None:
        if not 0 <= cut <= V:
            raise ValueError(f"cut point {cut} outside [0, {V}]")
        cuts = np.array([cut])
    elif V < 2:
        cuts = np.array([0])
    else:
        cuts = rng.integers(1, V, size=V)

    diff_at, ok1, ok2 = _cut_screen(parent1, parent2, instance)
    promising = (ok1 | ok2)[np.searchsorted(diff_at, cuts)]
    tried = set()
    for k in cuts[promising].tolist():
        if k in tried:
            continue
        tried.add(k)
        # the prefix-sum screen is approximate; exact loads decide
        kids = [x for x in _children(parent1, parent2, k, instance)
                if x.within_capacity(instance)]
        if kids:
            return kids
    return []


def greedy_mutate(assignment: Assignment, instance: Instance,
                  rng: np.random.Generator) -> Assignment:
    """Sweep every gene once, setting each to the cheapest machine with room for it.

    All machines are candidates, so no single step raises the cost; ties go
    to the lowest machine index.  The sweep starts at a random gene and
    wraps around.  Mutates in place.
    """
    app, machines = instance.app, instance.machines
    start = int(rng.integers(instance.V))
    assignment.cost += greedy_sweep(assignment.genes, assignment.loads, app.demands,
                                    machines.limits, app.adj_ptr, app.adj_nbr, app.adj_w,
                                    machines.link_cost, start)
    return assignment


def greedy_mutate_gene(assignment: Assignment, instance: Instance,
                       rng: np.random.Generator) -> Assignment:
    """Single-gene greedy mutation: draw ``Mn`` machines with replacement for
    one random gene and keep the cheapest one with room (ties to the lowest
    index).

    If no draw fits, other genes are tried, at most V in total.  Mutates in place.
    """
    V, Mn = instance.V, instance.Mn
    if Mn < 2:
        return assignment
    demands = instance.app.demands
    limits = instance.machines.limits
    order = rng.permutation(V)
    for v in order.tolist():
        cur = int(assignment.genes[v])
        draws = np.unique(rng.integers(0, Mn, size=Mn))
        room = (assignment.loads[draws] + demands[v] <= limits[draws]) | (draws == cur)
        draws = draws[room]
        if draws.size == 0:
            continue
        deltas = move_deltas(instance.app, instance.machines, assignment.genes, v)[draws]
        # np.unique sorted the draws, so argmin breaks ties to the lowest index
        m = int(draws[np.argmin(deltas)])
        if m != cur:
            apply_move(instance, assignment, v, m, float(deltas.min()))
        return assignment
    return assignment


def random_mutate(assignment: Assignment, instance: Instance,
                  rng: np.random.Generator) -> Assignment:
    """Move one random gene to the first uniformly drawn machine with room for it.

    Falls back to other gene positions, at most V in total; returns the
    input unchanged when no feasible move exists.  Mutates in place.
    """
    V, Mn = instance.V, instance.Mn
    if Mn < 2:
        return assignment
    demands = instance.app.demands
    limits = instance.machines.limits
    first = int(rng.integers(V))
    positions = [first]
    for attempt in range(V):
        if attempt == 1:
            rest = rng.permutation(V)
            positions.extend(int(p) for p in rest if p != first)
        v = positions[attempt]
        cur = int(assignment.genes[v])
        draws = rng.permutation(Mn - 1)
        for m in (draws + (draws >= cur)).tolist():
            if assignment.loads[m] + demands[v] <= limits[m]:
                apply_move(instance, assignment, v, m)
                return assignment
    return assignment


def similarity(x1, x2) -> float:
    """Fraction of gene positions on which two genotypes agree."""
    g1 = x1.genes if isinstance(x1, Assignment) else np.asarray(x1)
    g2 = x2.genes if isinstance(x2, Assignment) else np.asarray(x2)
    if g1.shape != g2.shape:
        raise ValueError(f"genotype lengths differ: {g1.shape} vs {g2.shape}")
    if g1.size == 0:
        return 1.0
    return float(np.count_nonzero(g1 == g2)) / g1.size


def twin_removal(population: list[Assignment], instance: Instance, params: GaParams,
                 rng: np.random.Generator, protect: int | None = 0) -> list[int]:
    """Reinitialize the later member of every near-identical pair.

    Pairs are swept in ``(i, j)``, ``i < j`` order against the current
    (possibly already reinitialized) population.  ``protect`` names an
    index that is never replaced; if it is the later member of a pair the
    earlier one goes instead.  Returns replaced indices in sweep order.
    """
    replaced = []
    n = len(population)
    for i in range(n):
        for j in range(i + 1, n):
            if similarity(population[i], population[j]) < params.similarity_threshold:
                continue
            victim = i if j == protect else j
            population[victim] = initialize_individual(instance, params, rng)
            replaced.append(victim)
    return replaced


def random_restart(population: list[Assignment], instance: Instance, params: GaParams,
                   rng: np.random.Generator, protect: int | None = 0) -> list[int]:
    """Reinitialize the ``ceil(restart_fraction * n)`` costliest individuals.

    The protected index (the elite) is excluded from the ranking.
    """
    n = len(population)
    count = math.ceil(params.restart_fraction * n)
    candidates = [i for i in range(n) if i != protect]
    # costliest first; equal costs keep index order
    candidates.sort(key=lambda i: -population[i].cost)
    victims = sorted(candidates[:count])
    for i in victims:
        population[i] = initialize_individual(instance, params, rng)
    return victims


def _stagnated(history: list[float], g: int, last_restart: int, params: GaParams) -> bool:
    span = params.random_restart_interval
    if g - last_restart < span:
        return False
    before, now = history[g - span], history[g]
    return (before - now) / max(before, STAGNATION_EPS) <= params.improvement_threshold


def _breed(population, costs, instance, params, rng) -> Assignment:
    p1 = p2 = None
    for _ in range(params.population_size):
        p1, p2 = tournament_select(population, params.tournament_size, rng, costs)
        kids = crossover(p1, p2, instance, rng)
        if kids:
            return min(kids, key=lambda c: c.cost)
    return (p1 if p1.cost <= p2.cost else p2).copy()


def _improved(best: Assignment, population: list[Assignment], instance: Instance) -> Assignment:
    cand = min(population, key=lambda x: x.cost)
    if cand.cost >= best.cost:
        return best
    # cached costs carry one mutation delta of rounding; the elite is exact
    cand = cand.copy()
    cand.refresh(instance)
    return cand if cand.cost < best.cost else best


Observer = Callable[[int, list, Assignment], None]


def run_fgpga(instance: Instance, params: GaParams | None = None,
              observer: Observer | None = None, label: str = "fgpga") -> RunReport:
    """Run the genetic algorithm to its generation budget.

    ``observer(generation, population, global_best)`` is called for the
    initial population (generation 0) and after every generation.
    """
    params = params or GaParams()
    rng = make_rng(params.rng_seed)
    n = params.population_size
    G = params.generations(instance.V)
    t0 = time.perf_counter()

    try:
        population = [initialize_individual(instance, params, rng) for _ in range(n)]
    except InitializationError:
        return RunReport(label, instance.name, params.rng_seed, instance.V, instance.Mn,
                         best_cost=math.nan, best_genes=None, feasible=False,
                         iterations=0, evaluations=0,
                         wall_time_ms=(time.perf_counter() - t0) * 1e3,
                         status="init-failed")

    greedy = greedy_mutate if params.greedy_scope == "sweep" else greedy_mutate_gene
    best = min(population, key=lambda x: x.cost).copy()
    if observer:
        observer(0, population, best)
    history = [best.cost]
    trace = []
    last_restart = 0

    for g in range(1, G + 1):
        costs = np.array([x.cost for x in population])
        offspring = [best.copy()]
        while len(offspring) < n:
            child = _breed(population, costs, instance, params, rng)
            if rng.random() < params.greedy_mutation_rate:
                greedy(child, instance, rng)
            else:
                random_mutate(child, instance, rng)
            offspring.append(child)
        population = offspring
        best = _improved(best, population, instance)
        history.append(best.cost)

        twins = g % params.twin_removal_interval == 0
        if twins:
            twin_removal(population, instance, params, rng, protect=0)
        restart = _stagnated(history, g, last_restart, params)
        if restart:
            random_restart(population, instance, params, rng, protect=0)
            last_restart = g
        if twins or restart:
            best = _improved(best, population, instance)
            history[g] = best.cost

        trace.append(GenerationRecord(
            generation=g,
            evaluations=g * n,
            best_cost=best.cost,
            population_mean_cost=float(np.mean([x.cost for x in population])),
            restart_fired=restart,
            twin_removal_fired=twins,
        ))
        if observer:
            observer(g, population, best)
        if params.stop_at_zero and best.cost == 0.0:
            break

    best.refresh(instance)
    return RunReport(label, instance.name, params.rng_seed, instance.V, instance.Mn,
                     best_cost=best.cost, best_genes=best.genes.copy(),
                     feasible=best.is_feasible(instance),
                     iterations=len(trace), evaluations=len(trace) * n,
                     wall_time_ms=(time.perf_counter() - t0) * 1e3, trace=trace)


def no_greedy(params: GaParams) -> GaParams:
    """The ablation variant: random mutation only."""
    return replace(params, greedy_mutation_rate=0.0)
