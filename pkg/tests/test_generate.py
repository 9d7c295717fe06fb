import math
from collections import Counter, deque

import numpy as np
import pytest

from fgpga import instance_io
from fgpga.generate import (DEFAULT_CAPACITIES, GenParams, densify, exponential,
                            generate_application_graph, generate_instance, generate_ladder,
                            instance_name, ladder_seed, with_roomy_machine)
from fgpga.graph import is_feasible


def _connected(app):
    seen = {0}
    todo = deque([0])
    while todo:
        v = todo.popleft()
        for u in app.neighbors(v)[0].tolist():
            if u not in seen:
                seen.add(u)
                todo.append(u)
    return len(seen) == app.vertex_count


def first_fit_decreasing(inst):
    """Place components largest first on the first machine with room."""
    order = np.argsort(-inst.app.demands, kind="stable")
    free = inst.machines.capacities.astype(float).copy()
    genes = np.zeros(inst.V, dtype=int)
    for v in order:
        fits = np.flatnonzero(free >= inst.app.demands[v])
        if fits.size == 0:
            return None
        genes[v] = fits[0]
        free[fits[0]] -= inst.app.demands[v]
    return genes


def test_defaults():
    p = GenParams(vertex_count=10)
    assert (p.vertex_weight_lambda, p.edge_weight_lambda, p.capacity_headroom,
            p.machine_link_lambda, p.power_law_exponent, p.target_edge_factor) == \
        (0.1, 0.005, 1.5, 0.005, 2.5, 2.0)
    assert p.capacity_choices == tuple(range(100, 801, 100))


def test_exponential_mean():
    rng = np.random.default_rng(0)
    xs = [exponential(rng, 0.1) for _ in range(20000)]
    assert min(xs) >= 0 and abs(np.mean(xs) - 10) < 0.5


@pytest.fixture(scope="module")
def big_app():
    return generate_application_graph(GenParams(vertex_count=10000, rng_seed=1),
                                      np.random.default_rng(1))


def test_demand_and_weight_means(big_app):
    assert abs(np.mean(big_app.demands) - 10) <= 0.5
    assert big_app.edge_count >= 10_000
    assert abs(np.mean(big_app.weight) - 200) <= 10


def test_demands_rounded_and_bounded(big_app):
    assert np.all(big_app.demands <= 800)
    assert np.allclose(big_app.demands, np.round(big_app.demands, 3), atol=0, rtol=0)


def test_sparse_connected():
    for v in (10, 100, 1000):
        inst = generate_instance(GenParams(vertex_count=v, rng_seed=v))
        assert inst.app.edge_count <= 2.0 * v * 1.1
        assert _connected(inst.app)


def test_power_law_degree_tail(big_app):
    hist = Counter(big_app.degrees().tolist())
    k = np.array(sorted(hist))
    n = np.array([hist[d] for d in k])
    x, y = np.log10(k), np.log10(n)
    slope, intercept = np.polyfit(x, y, 1)
    r2 = 1 - np.sum((y - (slope * x + intercept)) ** 2) / np.sum((y - y.mean()) ** 2)
    assert slope < 0 and r2 >= 0.8


def test_machine_fleet_properties():
    for seed in range(100):
        inst = generate_instance(GenParams(vertex_count=50 + seed, rng_seed=seed))
        caps = inst.machines.capacities
        assert caps.sum() >= 1.5 * inst.app.demands.sum()
        assert set(caps.tolist()) <= set(DEFAULT_CAPACITIES)
        assert caps.max() >= inst.app.demands.max()
        b = inst.machines.link_cost
        # shortest-path closure: no detour is cheaper than the direct cost
        assert np.all(b[:, :, None] <= b[:, None, :] + b[None, :, :].transpose(0, 2, 1) + 1e-9)
        assert np.array_equal(b, b.T)
        assert first_fit_decreasing(inst) is not None


def test_ffd_solution_is_feasible():
    inst = generate_instance(GenParams(vertex_count=300, rng_seed=3))
    genes = first_fit_decreasing(inst)
    assert is_feasible(inst.app, inst.machines, genes)


def test_densify_path():
    b = densify(3, [(0, 1, 2.0), (1, 2, 3.0)])
    assert b.tolist() == [[0, 2, 5], [2, 0, 3], [5, 3, 0]]
    with pytest.raises(ValueError):
        densify(3, [(0, 1, 1.0)])


def test_same_seed_same_bytes():
    a = instance_io.dumps(generate_instance(GenParams(vertex_count=120, rng_seed=7)))
    b = instance_io.dumps(generate_instance(GenParams(vertex_count=120, rng_seed=7)))
    c = instance_io.dumps(generate_instance(GenParams(vertex_count=120, rng_seed=8)))
    assert a == b and a != c


def test_ladder():
    ladder = generate_ladder(range(100, 1001, 100), 42)
    assert [i.V for i in ladder] == list(range(100, 1001, 100))
    assert ladder[0].name == instance_name(100, 42) == "pl0100_s42"
    # a size's instance does not depend on which other sizes are requested
    alone = generate_ladder([300], 42)[0]
    assert instance_io.dumps(alone) == instance_io.dumps(ladder[2])
    assert ladder_seed(42, 300) != ladder_seed(42, 400)


def test_roomy_machine():
    inst = generate_instance(GenParams(vertex_count=60, rng_seed=2))
    roomy = with_roomy_machine(inst)
    assert is_feasible(roomy.app, roomy.machines, [0] * 60)
    assert math.isclose(roomy.machines.capacities[0], max(inst.machines.capacities[0],
                                                          inst.app.demands.sum()))
