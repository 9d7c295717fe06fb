"""Capacity-feasible partitioning of an application graph onto heterogeneous machines."""

from .ga import GaParams, InitializationError, run_fgpga
from .generate import GenParams, generate_instance
from .graph import (ApplicationGraph, Assignment, Instance, MachineGraph, apply_move,
                    cut_cost, delta_cost, is_feasible)
from .oracle import OracleResult, solve_exact
from .report import RunReport
from .sa import SaParams, run_sa

__all__ = [
    "ApplicationGraph", "Assignment", "GaParams", "GenParams", "InitializationError",
    "Instance", "MachineGraph", "OracleResult", "RunReport", "SaParams", "apply_move",
    "cut_cost", "delta_cost", "generate_instance", "is_feasible", "run_fgpga", "run_sa",
    "solve_exact",
]
