import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import single_edge, triangle
from planar_reach.augment import (
    MAX_DEGREE, compose, connect, expand_and_triangulate, identity, preprocess,
)
from planar_reach.errors import EmptyGraph, MismatchedStages
from planar_reach.generators import generate, sparse_planar
from planar_reach.oracle import adjacency, reach_set, scc_labels
from planar_reach.plane_graph import PlaneMultigraph, faces


def _check_invariants(aug):
    g2, g = aug.graph, aug.source
    assert not (aug.E0 & aug.E1)
    assert len(set(aug.p)) == len(aug.p) == g.m
    for e, x in enumerate(aug.p):
        assert aug.orig[g2.tail[x]] == g.tail[e]
        assert aug.orig[g2.head[x]] == g.head[e]
    lab = scc_labels(g2.n, [(g2.tail[e], g2.head[e]) for e in aug.E0])
    classes = {}
    for v in range(g2.n):
        classes.setdefault(lab[v], set()).add(v)
    assert sorted(map(sorted, classes.values())) == sorted(sorted(s) for s in aug.S if s)
    for e in aug.E0:
        assert lab[g2.tail[e]] == lab[g2.head[e]]


def test_connect_fixed_point():
    assert connect(triangle()).graph.m == 3


def test_connect_two_edges_and_isolated():
    g = PlaneMultigraph(4, [(0, 1), (2, 3)], [[0], [1], [2], [3]])
    c = connect(g)
    assert c.graph.m == 3 and c.graph.is_connected()
    iso = PlaneMultigraph(5, [], [[] for _ in range(5)])
    assert connect(iso).graph.m == 4


def test_expand_single_edge():
    aug = expand_and_triangulate(single_edge())
    assert [len(s) for s in aug.S] == [3, 3]
    assert len(aug.p) == 1
    g2 = aug.graph
    assert all(g2.tail[e] != g2.head[e] for e in range(g2.m))
    assert all(len(w) == 3 for w in faces(g2).walks)


def test_expand_loop_is_eliminated():
    g = PlaneMultigraph(2, [(0, 0), (0, 1)], [[0, 1, 2], [3]])
    aug = expand_and_triangulate(g)
    assert len(aug.S[0]) == 9          # ring length 3 counts both loop darts
    x = aug.p[0]
    assert aug.graph.tail[x] != aug.graph.head[x]
    _check_invariants(aug)


def test_expand_triangle_sizes():
    aug = expand_and_triangulate(triangle())
    assert aug.graph.n == 18
    assert all(len(w) == 3 for w in faces(aug.graph).walks)
    assert aug.D <= MAX_DEGREE


def test_expand_empty_graph():
    with pytest.raises(EmptyGraph):
        expand_and_triangulate(PlaneMultigraph(1, [], [[]]))


def test_compose_identity_and_mismatch():
    c = connect(triangle())
    comp = compose(c, identity(c.graph))
    assert comp.p == c.p and comp.E0 == c.E0
    with pytest.raises(MismatchedStages):
        compose(c, identity(triangle()))


def test_compose_two_components_scc_count():
    g = PlaneMultigraph(4, [(0, 1), (2, 3)], [[0], [1], [2], [3]])
    aug = preprocess(g)
    lab = scc_labels(aug.graph.n, [(aug.graph.tail[e], aug.graph.head[e]) for e in aug.E0])
    assert len(set(lab)) == 4
    _check_invariants(aug)


def test_compose_associative():
    g = generate("grid", 9, 2)
    a = connect(g)
    b = identity(a.graph)
    c = expand_and_triangulate(b.graph)
    left = compose(compose(a, b), c)
    right = compose(a, compose(b, c))
    assert left.p == right.p and left.E0 == right.E0 and left.orig == right.orig


def test_size_report():
    for seed in range(5):
        g = generate("triangulation", 30, seed)
        aug = preprocess(g)
        assert aug.graph.n <= 6 * g.m + 6
        assert aug.graph.m <= 30 * g.m + 30
        assert aug.D <= MAX_DEGREE


@settings(max_examples=20, deadline=None)
@given(st.integers(3, 30), st.integers(0, 10_000))
def test_reachability_preserved(n, seed):
    g = sparse_planar(n, seed, keep=0.7)
    if g.m == 0:
        return
    aug = preprocess(g)
    _check_invariants(aug)
    g2 = aug.graph
    assert all(len(w) == 3 for w in faces(g2).walks)
    rng = random.Random(seed)
    F = [e for e in range(g.m) if rng.random() < 0.5]
    adj = adjacency(g.n, [(g.tail[e], g.head[e]) for e in F])
    adj2 = adjacency(g2.n, [(g2.tail[e], g2.head[e]) for e in list(aug.E0) + [aug.p[e] for e in F]])
    for u in range(g.n):
        if not aug.S[u]:
            continue
        r1 = reach_set(g.n, adj, u)
        u2 = rng.choice(aug.S[u])
        r2 = reach_set(g2.n, adj2, u2)
        for v in range(g.n):
            if aug.S[v]:
                assert (v in r1) == (rng.choice(aug.S[v]) in r2)
