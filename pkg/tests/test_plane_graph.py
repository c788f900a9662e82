import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import single_edge, tiny, triangle
from planar_reach.errors import DisconnectedInput, MalformedRing, NonPlanarRotation, ParseError
from planar_reach.generators import generate, grid, sparse_planar, triangulation
from planar_reach.oracle import scc_labels
from planar_reach.plane_graph import (
    PlaneMultigraph, build_from_rotation, check_remove_contract_duality, classify_edges_scc,
    dual, faces, format_instance, parse_instance,
)


def test_single_edge_euler():
    g = build_from_rotation(2, [[0], [1]], [(0, 1)])
    assert (g.n, g.m) == (2, 1)
    assert faces(g).count == 1


def test_triangle_faces():
    fs = faces(triangle())
    assert fs.count == 2
    assert all(len(w) == 3 for w in fs.walks)
    assert all(fs.is_simple(triangle(), f) for f in range(2))


def test_k5_rejected():
    edges = [(a, b) for a in range(5) for b in range(a + 1, 5)]
    darts = [[] for _ in range(5)]
    for e, (t, h) in enumerate(edges):
        darts[t].append(2 * e)
        darts[h].append(2 * e + 1)
    with pytest.raises(NonPlanarRotation):
        PlaneMultigraph(5, edges, darts)


def test_missing_dart_rejected():
    with pytest.raises(MalformedRing):
        PlaneMultigraph(2, [(0, 1)], [[0], []])


def test_loop_face_not_simple():
    g = PlaneMultigraph(1, [(0, 0)], [[0, 1]])
    assert faces(g).count == 2
    # a loop plus a pendant edge: one walk meets the vertex twice
    g2 = PlaneMultigraph(2, [(0, 0), (0, 1)], [[0, 1, 2], [3]])
    fs2 = faces(g2)
    assert any(not fs2.is_simple(g2, f) for f in range(fs2.count))


def test_parallel_edges_two_digons():
    g = PlaneMultigraph(2, [(0, 1), (0, 1)], [[0, 2], [1, 3]])
    fs = faces(g)
    assert sorted(len(w) for w in fs.walks) == [2, 2]


def test_dual_of_triangle():
    d = dual(triangle()).graph
    assert d.n == 2 and d.m == 3
    tails = {d.tail[e] for e in range(3)}
    heads = {d.head[e] for e in range(3)}
    assert len(tails) == 1 and len(heads) == 1 and tails != heads


def test_dual_single_edge_is_loop():
    d = dual(single_edge()).graph
    assert d.n == 1 and d.m == 1 and d.tail[0] == d.head[0] == 0


def test_dual_grid_edge_count():
    g = grid(9, 0)
    assert dual(g).graph.m == g.m == 12


def test_dual_needs_connected():
    g = PlaneMultigraph(4, [(0, 1), (2, 3)], [[0], [1], [2], [3]])
    with pytest.raises(DisconnectedInput):
        dual(g)


def test_duality_triangle_all_edges():
    g = triangle()
    assert all(check_remove_contract_duality(g, e) for e in range(3))


def test_duality_grid_random_edges():
    g = grid(9, 3)
    rng = random.Random(1)
    tried = 0
    for e in rng.sample(range(g.m), g.m):
        gm, _ = g.without_edge(e)
        if gm.is_connected():
            assert check_remove_contract_duality(g, e)
            tried += 1
    assert tried >= 4


def test_duality_single_edge_precondition():
    with pytest.raises(DisconnectedInput):
        check_remove_contract_duality(single_edge(), 0)


def test_classify_triangle_and_path():
    assert classify_edges_scc(triangle()) == ["intra"] * 3
    d = dual(triangle()).graph
    lab = scc_labels(d.n, d.edges())
    assert all(lab[d.tail[e]] != lab[d.head[e]] for e in range(3))
    path = PlaneMultigraph(3, [(0, 1), (1, 2)], [[0], [1, 2], [3]])
    assert classify_edges_scc(path) == ["inter", "inter"]
    anti = PlaneMultigraph(2, [(0, 1), (1, 0)], [[0, 3], [1, 2]])
    assert classify_edges_scc(anti) == ["intra", "intra"]


def test_reverse_edges_embedding():
    g = triangulation(12, 2)
    h = g.with_reverse_edges()
    assert h.m == 2 * g.m
    for e in range(g.m):
        assert (h.tail[g.m + e], h.head[g.m + e]) == (g.head[e], g.tail[e])
    # every original edge bounds a digon with its reverse copy
    assert sum(1 for w in faces(h).walks if len(w) == 2) == g.m


def test_instance_roundtrip():
    g = generate("triangulation", 20, 4)
    text = format_instance(g, "round trip")
    g2 = parse_instance(text)
    assert g2.edges() == g.edges() and g2.rings == g.rings


def test_parse_error_has_line():
    with pytest.raises(ParseError) as ei:
        parse_instance("2 1\n0 x\n")
    assert ei.value.line == 2


@settings(max_examples=25, deadline=None)
@given(st.integers(4, 40), st.integers(0, 10_000), st.sampled_from(["grid", "triangulation", "cyclegrid"]))
def test_euler_and_dual_correspondence(n, seed, kind):
    g = generate(kind, n, seed)
    fs = faces(g)
    assert g.n - g.m + fs.count == 2
    # classify_edges_scc raises on any dual mismatch
    labels = classify_edges_scc(g)
    assert len(labels) == g.m


@settings(max_examples=15, deadline=None)
@given(st.integers(6, 30), st.integers(0, 10_000))
def test_remove_contract_duality_property(n, seed):
    g = sparse_planar(n, seed, keep=0.8)
    if not g.is_connected():
        return
    for e in range(g.m):
        gm, _ = g.without_edge(e)
        if gm.is_connected():
            assert check_remove_contract_duality(g, e)


def test_tiny_helper_embeds():
    g = tiny(4, [(0, 1), (1, 0), (1, 2), (2, 3), (3, 2)])
    assert g.m == 5
