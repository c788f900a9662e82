import math
import random

import pytest

from conftest import bridge_run, instance, live, scc_ssr_run, tiny, triangle
from planar_reach.errors import AlreadyDeleted, UnknownEdge, UnknownVertex
from planar_reach.generators import generate
from planar_reach.oracle import oracle_2ecs, oracle_inter_scc, oracle_scc
from planar_reach.reductions import Dec2ECS, DecInterSCC, DecSCC, DecSSR, DecStrongBridges


def test_inter_scc_triangle():
    d = DecInterSCC(triangle())
    assert d.inter_set() == set()
    assert sorted(d.delete(0)) == [1, 2]
    assert d.inter_set() == {1, 2}
    with pytest.raises(AlreadyDeleted):
        d.delete(0)
    with pytest.raises(UnknownEdge):
        d.delete(7)


def test_inter_scc_dag_input():
    g = tiny(4, [(0, 1), (1, 2), (0, 2), (2, 3)])
    d = DecInterSCC(g)
    assert d.inter_set() == {0, 1, 2, 3}
    for e in range(4):
        assert d.delete(e) == []


def test_scc_triangle():
    d = DecSCC(triangle())
    assert d.same_scc(0, 1) and d.scc_count() == 1
    d.delete(0)
    assert not d.same_scc(0, 1)
    assert d.partition() == [frozenset({0}), frozenset({1}), frozenset({2})]
    with pytest.raises(UnknownVertex):
        d.same_scc(0, 5)


def test_scc_joining_edge_is_inter():
    # 0 <-> 1 and 2 <-> 3 joined by 1 -> 2
    g = tiny(4, [(0, 1), (1, 0), (2, 3), (3, 2), (1, 2)])
    d = DecSCC(g)
    before = d.partition()
    assert before == [frozenset({0, 1}), frozenset({2, 3})]
    d.delete(4)
    assert d.partition() == before


def test_ssr_path():
    g = tiny(3, [(0, 1), (1, 2)])
    d = DecSSR(g, 0)
    assert d.reachable_set() == {0, 1, 2}
    assert d.delete(0) == [1, 2]
    assert d.reachable_set() == {0}


def test_ssr_cycle_split():
    # s=0 -> a=1 -> b=2 -> s
    d = DecSSR(triangle(), 0)
    assert d.delete(1) == [2]
    assert d.reachable_set() == {0, 1}
    assert d.reachable(1) and not d.reachable(2)


def test_ssr_bad_source():
    with pytest.raises(UnknownVertex):
        DecSSR(triangle(), 3)


def test_bridges_three_cycle():
    d = DecStrongBridges(triangle())
    assert d.strong_bridges() == {0, 1, 2}


def test_bridges_detour():
    # u=0, v=1, c=2: u->v, u->c, c->v, v->u
    g = tiny(3, [(0, 1), (0, 2), (2, 1), (1, 0)])
    b = DecStrongBridges(g).strong_bridges()
    assert 3 in b and 0 not in b


def test_bridges_doubled():
    g = tiny(2, [(0, 1), (0, 1), (1, 0), (1, 0)])
    assert DecStrongBridges(g).strong_bridges() == set()
    assert Dec2ECS(g).twoecs_partition() == [frozenset({0, 1})]


def test_2ecs_three_cycle():
    d = Dec2ECS(triangle())
    assert d.twoecs_partition() == [frozenset({0}), frozenset({1}), frozenset({2})]
    # edges already removed by the cascade can still be deleted by the user once
    d.delete(0)
    with pytest.raises(AlreadyDeleted):
        d.delete(0)


def test_loops_are_never_bridges():
    g = tiny(2, [(0, 0), (0, 1), (1, 0)])
    d = DecStrongBridges(g)
    assert 0 not in d.strong_bridges()
    assert not d.core.is_inter(0)


@pytest.mark.parametrize("seed", range(6))
def test_scc_and_ssr_sweep(seed):
    assert scc_ssr_run(seed, 10, 50) == ([], [])


@pytest.mark.parametrize("seed", range(6))
def test_bridge_sweep(seed):
    assert bridge_run(seed, 8, 30) == []


@pytest.mark.parametrize("seed", range(4))
def test_2ecs_order_independent(seed):
    _, g = instance(seed, 10, 30)
    a, b = Dec2ECS(g, order="fifo"), Dec2ECS(g, order="lifo")
    rnd = random.Random(seed)
    deleted = [False] * g.m
    for e in rnd.sample(range(g.m), g.m):
        a.delete(e)
        b.delete(e)
        deleted[e] = True
        assert a.twoecs_partition() == b.twoecs_partition() == oracle_2ecs(g.n, live(g, deleted))


def test_inter_monotone_and_counters():
    g = generate("cyclegrid", 80, 3)
    d = DecSSR(g, 0)
    scc = d.scc
    rnd = random.Random(4)
    deleted = [False] * g.m
    seen = set()
    for e in rnd.sample(range(g.m), g.m):
        d.delete(e)
        deleted[e] = True
        now = scc.core.inter_set()
        assert seen - {e} <= now
        seen = now
        assert scc.partition() == oracle_scc(g.n, [x for x in live(g, deleted) if x])
        assert now == oracle_inter_scc(g.n, live(g, deleted))
    bound = g.n * math.log2(g.n)
    assert scc.relabel_touches <= 2 * bound
    assert d.dag_insertions <= 4 * (g.n + g.m) * math.log2(g.n)
