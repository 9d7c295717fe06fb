import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fgpga.generate import tiny_instance
from fgpga.graph import (ApplicationGraph, Assignment, Instance, MachineGraph, apply_move,
                         cut_cost, delta_cost, is_feasible, machine_loads, move_deltas)

from conftest import make_instance, naive_cut_cost, naive_loads


def test_cut_cost_colocated_is_zero(pair_instance):
    assert cut_cost(pair_instance.app, pair_instance.machines, [0, 0]) == 0


def test_cut_cost_single_edge(pair_instance):
    assert cut_cost(pair_instance.app, pair_instance.machines, [0, 1]) == 10


def test_cut_cost_path(path4):
    # 3*b01 + 0 + 5*b12 = 3 + 20
    genes = [0, 1, 1, 2]
    assert naive_cut_cost(path4, genes) == 23
    assert cut_cost(path4.app, path4.machines, genes) == 23


@pytest.mark.parametrize("genes", [[0, 0, 0], [0, 1], [0, 3, 0, 0], [-1, 0, 0, 0]])
def test_cut_cost_contract(path4, genes):
    with pytest.raises(ValueError):
        cut_cost(path4.app, path4.machines, genes)


@pytest.mark.parametrize("demands, caps, genes, expected", [
    ([3, 4], [10, 1], [0, 0], True),
    ([6, 6], [10, 10], [0, 0], False),
    ([6, 6], [10, 10], [0, 1], True),
])
def test_is_feasible_examples(demands, caps, genes, expected):
    inst = make_instance(demands, [(0, 1, 1.0)], caps, [[0, 1], [1, 0]])
    assert is_feasible(inst.app, inst.machines, genes) is expected


def test_invalid_graphs_rejected():
    with pytest.raises(ValueError):
        ApplicationGraph([1, 1], [(1, 0, 1.0)])
    with pytest.raises(ValueError):
        ApplicationGraph([1, 1], [(0, 1, 1.0), (0, 1, 2.0)])
    with pytest.raises(ValueError):
        ApplicationGraph([1, 1], [(0, 1, 0.0)])
    with pytest.raises(ValueError):
        ApplicationGraph([-1, 1], [])
    with pytest.raises(ValueError):
        MachineGraph([1, 1], [[0, 1], [2, 0]])
    with pytest.raises(ValueError):
        MachineGraph([1, 0], [[0, 1], [1, 0]])
    with pytest.raises(ValueError):
        MachineGraph([1, 1], [[1, 1], [1, 0]])


def test_adjacency_matches_edges(path4):
    nbr, w = path4.app.neighbors(1)
    assert sorted(zip(nbr.tolist(), w.tolist())) == [(0, 3.0), (2, 4.0)]
    assert path4.app.degrees().tolist() == [1, 2, 2, 1]


def test_instances_are_read_only(path4):
    with pytest.raises(ValueError):
        path4.app.demands[0] = 5
    with pytest.raises(ValueError):
        path4.machines.link_cost[0, 1] = 5


def test_delta_noop_and_single_edge(pair_instance):
    a = Assignment.from_genes(pair_instance, [0, 0])
    assert delta_cost(pair_instance.app, pair_instance.machines, a, 0, 0) == 0
    assert delta_cost(pair_instance.app, pair_instance.machines, a, 1, 1) == 10


def test_move_deltas_vector_matches_scalar():
    rng = np.random.default_rng(3)
    inst = tiny_instance(10, 3, rng)
    a = Assignment.from_genes(inst, rng.integers(0, 3, size=10))
    for v in range(10):
        vec = move_deltas(inst.app, inst.machines, a.genes, v)
        for m in range(3):
            assert vec[m] == pytest.approx(delta_cost(inst.app, inst.machines, a, v, m), abs=1e-9)
        assert vec[a.genes[v]] == 0


def test_apply_move_updates_loads(path4):
    a = Assignment.from_genes(path4, [0, 1, 1, 2])
    before = a.loads.copy()
    apply_move(path4, a, 1, 2)
    assert a.loads[1] == before[1] - 1 and a.loads[2] == before[2] + 1
    assert a.cost == pytest.approx(naive_cut_cost(path4, a.genes.tolist()))


def test_apply_then_revert_is_identity(path4):
    a = Assignment.from_genes(path4, [0, 1, 1, 2])
    orig = a.copy()
    apply_move(path4, a, 2, 0)
    apply_move(path4, a, 2, 1)
    assert a.genes.tolist() == orig.genes.tolist()
    np.testing.assert_allclose(a.loads, orig.loads, rtol=0, atol=1e-12)
    assert a.cost == pytest.approx(orig.cost, rel=1e-12)


def test_random_moves_keep_caches_coherent():
    rng = np.random.default_rng(11)
    inst = tiny_instance(10, 3, rng)
    a = Assignment.from_genes(inst, rng.integers(0, 3, size=10))
    for _ in range(1000):
        v, m = int(rng.integers(10)), int(rng.integers(3))
        before = naive_cut_cost(inst, a.genes.tolist())
        d = delta_cost(inst.app, inst.machines, a, v, m)
        apply_move(inst, a, v, m, d)
        after = naive_cut_cost(inst, a.genes.tolist())
        assert d == pytest.approx(after - before, rel=1e-9, abs=1e-9)
        assert a.cost == pytest.approx(after, rel=1e-9, abs=1e-9)
        np.testing.assert_allclose(a.loads, naive_loads(inst, a.genes.tolist()), rtol=1e-9, atol=1e-9)


@st.composite
def instances_and_genes(draw):
    V = draw(st.integers(2, 8))
    Mn = draw(st.integers(1, 4))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    inst = tiny_instance(V, Mn, rng)
    genes = draw(st.lists(st.integers(0, Mn - 1), min_size=V, max_size=V))
    return inst, genes


@settings(max_examples=150, deadline=None)
@given(instances_and_genes())
def test_cut_cost_matches_naive_sum(data):
    inst, genes = data
    assert cut_cost(inst.app, inst.machines, genes) == pytest.approx(
        naive_cut_cost(inst, genes), rel=1e-12, abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(instances_and_genes(), st.randoms(use_true_random=False))
def test_cut_cost_invariant_under_machine_relabelling(data, rnd):
    inst, genes = data
    perm = list(range(inst.Mn))
    rnd.shuffle(perm)
    inv = np.argsort(perm)
    b = inst.machines.link_cost[np.ix_(inv, inv)]
    caps = inst.machines.capacities[inv]
    relabelled = Instance(inst.app, MachineGraph(caps, b))
    new_genes = [perm[g] for g in genes]
    assert cut_cost(relabelled.app, relabelled.machines, new_genes) == pytest.approx(
        cut_cost(inst.app, inst.machines, genes), rel=1e-12)
    assert is_feasible(relabelled.app, relabelled.machines, new_genes) == \
        is_feasible(inst.app, inst.machines, genes)


@settings(max_examples=100, deadline=None)
@given(instances_and_genes(), st.integers(0, 3))
def test_all_equal_genes_cost_zero(data, m):
    inst, _ = data
    genes = [m % inst.Mn] * inst.V
    assert cut_cost(inst.app, inst.machines, genes) == 0


@settings(max_examples=100, deadline=None)
@given(instances_and_genes(), st.floats(0, 100))
def test_feasibility_monotone_in_capacity(data, extra):
    inst, genes = data
    if not is_feasible(inst.app, inst.machines, genes):
        return
    k = genes[0]
    caps = inst.machines.capacities.copy()
    caps[k] += extra
    bigger = MachineGraph(caps, inst.machines.link_cost)
    assert is_feasible(inst.app, bigger, genes)


def test_loads_follow_index_order():
    inst = make_instance([0.1, 0.2, 0.3], [(0, 1, 1.0)], [10], [[0]])
    loads = machine_loads(inst.app, inst.machines, [0, 0, 0])
    assert loads[0] == (0.1 + 0.2) + 0.3
    assert not math.isnan(loads[0])
