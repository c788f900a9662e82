import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import harvest, mc_sequence
from planar_reach.errors import AlreadyOne, BadParams, OverlapViolation
from planar_reach.monge import (
    BLOCK_CAP, CurveOrder, MergeClosure, PartitionedMatrix, ReachSubmatrix,
    merge_closure_new, partition_multi_curve, partition_single_curve, projection_bound,
    verify_blocks, verify_monge,
)


def _f(k):
    # projection size recurrence for the halving scheme
    return 0 if k <= 1 else _f((k + 1) // 2) + 1


def test_single_curve_trivial():
    assert partition_single_curve([7]) == []
    with pytest.raises(BadParams):
        partition_single_curve([])


def test_single_curve_four():
    parts = partition_single_curve([1, 2, 3, 4])
    assert sorted(parts) == sorted([((1, 2), (3, 4)), ((3, 4), (1, 2)), ((1,), (2,)),
                                    ((2,), (1,)), ((3,), (4,)), ((4,), (3,))])
    assert sum(1 for S, _ in parts if 1 in S) == 2


@pytest.mark.parametrize("k", [2, 3, 5, 17, 64, 100])
def test_single_curve_projection_bound(k):
    part = partition_multi_curve(CurveOrder([list(range(k))]))
    assert part.coverage_violations() == []
    assert part.max_projection() <= _f(k) <= projection_bound(part.order)
    if k == 64:
        assert part.max_projection() <= 6


def test_multi_curve_reduces_to_single():
    seq = [5, 3, 9, 1, 4]
    part = partition_multi_curve(CurveOrder([seq]))
    assert sorted(part.sets(i) for i in range(len(part))) == sorted(partition_single_curve(seq))


def test_multi_curve_two_by_two():
    part = partition_multi_curve(CurveOrder([[0, 1], [2, 3]]))
    kinds = [m.kind for m in part.members]
    assert kinds.count("inter") == 2 and kinds.count("bipartite") == 4
    assert part.max_projection() <= 2
    assert part.coverage_violations() == []


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(1, 12), min_size=1, max_size=4))
def test_partition_coverage_and_shape(sizes):
    groups, nxt = [], 0
    for s in sizes:
        groups.append(list(range(nxt, nxt + s)))
        nxt += s
    order = CurveOrder(groups)
    part = partition_multi_curve(order)
    assert part.coverage_violations() == []
    assert part.max_projection() <= projection_bound(order)
    # the shape never depends on entries: a second build is identical
    again = partition_multi_curve(CurveOrder(groups))
    assert [(m.kind, m.s0, m.s1, m.t0, m.t1) for m in part.members] == \
        [(m.kind, m.s0, m.s1, m.t0, m.t1) for m in again.members]


def test_curve_order_rejects_repeats():
    with pytest.raises(OverlapViolation):
        CurveOrder([[1, 2], [2, 3]])


def test_apply_first_one():
    pm = PartitionedMatrix(CurveOrder([[10, 11, 12, 13]]))
    d = pm.apply_updates([(10, 12)])
    M = pm.partition.member_of(0, 2)
    assert d.col_act == [(M, 2)]
    assert pm.rint[M][0] == [(2, 3)]


def test_apply_gap_over_inactive_column():
    # S = (0,), T = (1..5); ones at 2, 3, 5 and column 4 never active
    pm = PartitionedMatrix(CurveOrder([[0], list(range(1, 7))]))
    pm.apply_updates([(0, 2), (0, 3), (0, 5)])
    M = pm.partition.member_of(0, 2)
    assert len(pm.rint[M][0]) == 1
    assert pm.submatrix(M).row_blocks(0) == 1


def test_apply_already_one():
    pm = PartitionedMatrix(CurveOrder([[0, 1]]))
    pm.apply_updates([(0, 1)])
    with pytest.raises(AlreadyOne):
        pm.apply_updates([(0, 1)])


def test_out_positions_roundtrip():
    pm, problems = harvest("triangulation", 25, 3, curves=2)
    assert problems == []
    for s in range(pm.k):
        assert pm.out_positions(s) == pm.row[s]


def _sides(order1, order2, track=True):
    return (PartitionedMatrix(CurveOrder(order1), track=track),
            PartitionedMatrix(CurveOrder(order2), track=track))


@pytest.mark.parametrize("probe", ["rows", "intervals"])
def test_mc_empty_inputs(probe):
    a, b = _sides([[1, 2, 3]], [[3, 4]])
    mc = merge_closure_new(a, b, probe=probe)
    assert mc.closure_pairs() == set()
    assert mc.reaches(2, 2)


def test_mc_shared_vertex_chain():
    a, b = _sides([["x", "y"]], [["y", "z"]])
    a.apply_updates([("x", "y")])
    b.apply_updates([("y", "z")])
    mc = merge_closure_new(a, b, shared=["y"])
    assert mc.reaches("x", "z") and not mc.reaches("z", "x")


def test_mc_overlap_violation():
    a, b = _sides([[1, 2]], [[3, 4]])
    with pytest.raises(OverlapViolation):
        merge_closure_new(a, b, shared=[1])


def test_mc_disjoint_block_diagonal():
    a, b = _sides([[1, 2]], [[3, 4]])
    a.apply_updates([(1, 2)])
    b.apply_updates([(4, 3)])
    mc = merge_closure_new(a, b, shared=[])
    assert mc.closure_pairs() == {(1, 2), (4, 3)}


@pytest.mark.parametrize("probe", ["rows", "intervals"])
def test_mc_three_cycle(probe):
    a, b = _sides([[1, 2, 3]], [[1, 2, 3]])
    mc = MergeClosure(a, b, probe=probe)
    got = mc.update([(0, a.apply_updates([(1, 2), (2, 3)]))])
    assert sorted(got) == [(1, 2), (1, 3), (2, 3)]
    got = mc.update([(1, b.apply_updates([(3, 1)]))])
    assert sorted(got) == [(2, 1), (3, 1), (3, 2)]
    assert mc.pushes <= mc.flips


@pytest.mark.parametrize("probe", ["rows", "intervals"])
def test_candidates_intersect(probe):
    # Out(b) = {t1, t2, t3}; a reaches t2 only
    a_, b_ = _sides([["a", "b", "t1", "t2", "t3"]], [["a", "t2"]])
    a_.apply_updates([("b", "t1"), ("b", "t2"), ("b", "t3")])
    b_.apply_updates([("a", "t2")])
    mc = MergeClosure(a_, b_, probe=probe)
    assert mc.candidates_intersect("a", "b") == {"t1", "t3"}
    assert mc.candidates_intersect("a", "t1") == set()
    mc.update([(0, a_.apply_updates([("a", "b")]))])
    assert mc.candidates_intersect("a", "b") == set()


def test_mc_bad_params():
    a, b = _sides([[1]], [[2]], track=False)
    with pytest.raises(BadParams):
        MergeClosure(a, b, probe="nope")
    with pytest.raises(BadParams):
        MergeClosure(a, b, probe="intervals")


def test_verify_monge_examples():
    assert not verify_monge(ReachSubmatrix.from_dense("ab", "cd", [[1, 0], [0, 1]]))
    ones = ReachSubmatrix.from_dense("abc", "def", [[1] * 3] * 3)
    assert verify_monge(ones) and verify_blocks(ones)
    # second row keeps every column active, so row one has two blocks
    split = ReachSubmatrix.from_dense("ab", "cdef", [[1, 0, 1, 0], [1, 1, 1, 1]])
    assert not verify_blocks(split)
    assert verify_blocks(ReachSubmatrix.from_dense("a", "cdef", [[1, 0, 1, 0]], kind="inter"))
    assert BLOCK_CAP == 8


@pytest.mark.parametrize("seed", range(12))
def test_harvested_matrices_are_monge(seed):
    kind = ["grid", "triangulation", "cyclegrid"][seed % 3]
    pm, problems = harvest(kind, 10 + seed, seed)
    assert problems == []


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["rows", "intervals"]),
       st.sampled_from(["bitset", "sorted"]))
def test_mc_matches_closure_oracle(seed, probe, pred):
    assert mc_sequence(seed, probe, pred) == []
