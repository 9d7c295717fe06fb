"""Run reports and per-iteration traces shared by both solvers."""

from __future__ import annotations

from dataclasses import dataclass, field, fields

import numpy as np


@dataclass
class GenerationRecord:
    generation: int
    evaluations: int
    best_cost: float
    population_mean_cost: float
    restart_fired: bool = False
    twin_removal_fired: bool = False


@dataclass
class EpochRecord:
    epoch: int
    evaluations: int
    best_cost: float
    current_cost: float
    temperature: float
    repairs: int = 0


def trace_columns(record_type) -> list[str]:
    return [f.name for f in fields(record_type)]


@dataclass
class RunReport:
    """Outcome of one seeded solver run.

    ``status`` is ``"ok"`` or ``"init-failed"``; in the latter case there is
    no assignment and ``best_cost`` is NaN.
    """

    algorithm: str
    instance: str
    seed: int
    V: int
    Mn: int
    best_cost: float
    best_genes: np.ndarray | None
    feasible: bool
    iterations: int
    evaluations: int
    wall_time_ms: float
    trace: list = field(default_factory=list)
    status: str = "ok"
    repairs: int = 0

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def best_cost_series(self) -> np.ndarray:
        return np.array([rec.best_cost for rec in self.trace], dtype=float)

    def evaluation_series(self) -> np.ndarray:
        return np.array([rec.evaluations for rec in self.trace], dtype=np.int64)
