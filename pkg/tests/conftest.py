import numpy as np
import pytest

from fgpga.graph import ApplicationGraph, Instance, MachineGraph


def make_instance(demands, edges, capacities, link_cost, name="t"):
    return Instance(ApplicationGraph(demands, edges), MachineGraph(capacities, link_cost), name)


def naive_cut_cost(instance, genes):
    """Double loop over the full weight matrix, halved: independent of the edge-list path."""
    V = instance.V
    W = np.zeros((V, V))
    for i, j, w in instance.app.edges:
        W[i, j] = W[j, i] = w
    b = instance.machines.link_cost
    total = 0.0
    for i in range(V):
        for j in range(V):
            if genes[i] != genes[j]:
                total += W[i, j] * b[genes[i]][genes[j]]
    return total / 2


def naive_loads(instance, genes):
    loads = [0.0] * instance.Mn
    for i, g in enumerate(genes):
        loads[g] += float(instance.app.demands[i])
    return loads


@pytest.fixture
def pair_instance():
    """V=2, one edge w=5, two machines with b01=2 and ample room."""
    return make_instance([3, 4], [(0, 1, 5.0)], [100, 100], [[0, 2], [2, 0]])


@pytest.fixture
def split_forced():
    """demands [6,6], capacities [10,10]: exactly one vertex per machine."""
    return make_instance([6, 6], [(0, 1, 5.0)], [10, 10], [[0, 2], [2, 0]])


@pytest.fixture
def path4():
    """4-vertex path with weights 3,4,5 on three machines."""
    b = [[0, 1, 2], [1, 0, 4], [2, 4, 0]]
    return make_instance([1, 1, 1, 1], [(0, 1, 3.0), (1, 2, 4.0), (2, 3, 5.0)],
                         [10, 10, 10], b)


# criterion number -> (passed, detail); filled by test_acceptance
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record_criterion(number: int, passed: bool, detail: str) -> None:
    ACCEPTANCE[number] = (passed, detail)
    print(f"criterion {number}: {'PASS' if passed else 'FAIL'} - {detail}")


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if passed else 'FAIL'} - {detail}")
