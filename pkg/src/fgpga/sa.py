"""Simulated annealing with feasibility repair.

A proposal that would overload a machine is swapped for a random move that
keeps every machine within capacity, and that substitute goes through the
same Metropolis test.  The chain therefore never leaves the feasible region.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .ga import GaParams, InitializationError, generations_for, initialize_individual, make_rng
from .graph import Assignment, Instance, apply_move, delta_cost
from .report import EpochRecord, RunReport

AUTO_TEMPERATURE_SAMPLES = 100


@dataclass
class SaParams:
    """Annealing schedule.

    ``None`` fields are resolved per instance by :meth:`resolve`:
    ``moves_per_epoch`` to ``10 * V``, ``epochs`` so that the total number of
    proposals matches ``evaluation_budget`` (by default the genetic
    algorithm's ``population_size * generations``), and
    ``initial_temperature`` to the mean absolute cost change of 100 random
    feasible moves from the starting state.
    """

    initial_temperature: float | None = None
    cooling_rate: float = 0.95
    epochs: int | None = None
    moves_per_epoch: int | None = None
    evaluation_budget: int | None = None
    rng_seed: int = 0

    def __post_init__(self):
        if not 0 < self.cooling_rate < 1:
            raise ValueError("cooling_rate must lie in (0, 1)")
        if self.initial_temperature is not None and self.initial_temperature <= 0:
            raise ValueError("initial_temperature must be positive")
        for name in ("epochs", "moves_per_epoch", "evaluation_budget"):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise ValueError(f"{name} must be positive")

    @classmethod
    def matched(cls, ga_params: GaParams, vertex_count: int, **kwargs) -> "SaParams":
        budget = ga_params.population_size * ga_params.generations(vertex_count)
        return cls(evaluation_budget=budget, **kwargs)

    def resolve(self, vertex_count: int) -> tuple[int, int]:
        """Concrete ``(epochs, moves_per_epoch)`` for an instance size."""
        moves = self.moves_per_epoch or 10 * vertex_count
        if self.epochs is not None:
            return self.epochs, moves
        budget = self.evaluation_budget or 20 * generations_for(vertex_count)
        return max(1, math.ceil(budget / moves)), moves


def propose_move(assignment: Assignment, instance: Instance,
                 rng: np.random.Generator) -> tuple[int, int] | None:
    """Uniform vertex, uniform machine other than its current one.

    Returns ``None`` when there is a single machine.
    """
    Mn = instance.Mn
    if Mn < 2:
        return None
    v = int(rng.integers(instance.V))
    m = int(rng.integers(Mn - 1))
    if m >= assignment.genes[v]:
        m += 1
    return v, m


def _move_fits(assignment: Assignment, instance: Instance, v: int, m: int) -> bool:
    return bool(assignment.loads[m] + instance.app.demands[v] <= instance.machines.limits[m])


def repair_move(assignment: Assignment, move: tuple[int, int], instance: Instance,
                rng: np.random.Generator) -> tuple[int, int] | None:
    """Return ``move`` if it keeps capacities, else a random move that does.

    At most ``V * Mn`` substitutes are drawn; ``None`` means the step is
    skipped.
    """
    if _move_fits(assignment, instance, *move):
        return move
    for _ in range(instance.V * instance.Mn):
        alt = propose_move(assignment, instance, rng)
        if alt is None:
            return None
        if _move_fits(assignment, instance, *alt):
            return alt
    return None


def auto_temperature(state: Assignment, instance: Instance, rng: np.random.Generator,
                     samples: int = AUTO_TEMPERATURE_SAMPLES) -> float:
    deltas = []
    for _ in range(samples):
        move = propose_move(state, instance, rng)
        if move is None:
            break
        move = repair_move(state, move, instance, rng)
        if move is not None:
            deltas.append(abs(delta_cost(instance.app, instance.machines, state, *move)))
    mean = float(np.mean(deltas)) if deltas else 0.0
    # all-zero samples leave no scale to anneal on; any positive value works
    return mean if mean > 0 else 1.0


def run_sa(instance: Instance, params: SaParams | None = None,
           observer=None, label: str = "sa") -> RunReport:
    """Anneal from a random feasible start.

    ``observer(step, state)`` is called after every proposal when given;
    it exists for instrumentation and slows the run down.
    """
    params = params or SaParams()
    rng = make_rng(params.rng_seed)
    epochs, moves = params.resolve(instance.V)
    t0 = time.perf_counter()

    try:
        state = initialize_individual(instance, GaParams(), rng)
    except InitializationError:
        return RunReport(label, instance.name, params.rng_seed, instance.V, instance.Mn,
                         best_cost=math.nan, best_genes=None, feasible=False,
                         iterations=0, evaluations=0,
                         wall_time_ms=(time.perf_counter() - t0) * 1e3,
                         status="init-failed")

    app, machines = instance.app, instance.machines
    temperature = params.initial_temperature or auto_temperature(state, instance, rng)
    best = state.copy()
    trace = []
    repairs_total = 0
    step = 0

    for epoch in range(1, epochs + 1):
        repairs = 0
        for _ in range(moves):
            step += 1
            move = propose_move(state, instance, rng)
            if move is None:
                break
            if not _move_fits(state, instance, *move):
                repairs += 1
                move = repair_move(state, move, instance, rng)
                if move is None:
                    continue
            v, m = move
            d = delta_cost(app, machines, state, v, m)
            if d <= 0 or rng.random() < math.exp(-d / temperature):
                apply_move(instance, state, v, m, d)
                if state.cost < best.cost:
                    best = state.copy()
            if observer:
                observer(step, state)
        # drop accumulated float drift once per epoch
        state.refresh(instance)
        repairs_total += repairs
        trace.append(EpochRecord(epoch=epoch, evaluations=epoch * moves,
                                 best_cost=best.cost, current_cost=state.cost,
                                 temperature=temperature, repairs=repairs))
        temperature *= params.cooling_rate

    best.refresh(instance)
    return RunReport(label, instance.name, params.rng_seed, instance.V, instance.Mn,
                     best_cost=best.cost, best_genes=best.genes.copy(),
                     feasible=best.is_feasible(instance),
                     iterations=len(trace), evaluations=len(trace) * moves,
                     wall_time_ms=(time.perf_counter() - t0) * 1e3,
                     trace=trace, repairs=repairs_total)
