"""Reachability-matrix partitions and the switch-on closure of two such matrices.

A boundary set ``U`` comes split into groups ``U_1 .. U_l``, one per separator
curve, each listed in its cyclic order along the curve.  Concatenating the
groups fixes the total order used everywhere below: an element's *position*
is its index in that concatenation, and every bitmask is indexed by position.

:class:`ReachPartition` cuts the ``|U| x |U|`` matrix into bipartite members
(both sides on one curve, one side entirely before the other) and inter-curve
members (one curve against another).  :class:`PartitionedMatrix` stores the
entries of a monotonically growing matrix together with the active-column
sets and the interval form of every row.  :class:`MergeClosure` maintains the
closure of the union of two such matrices with the queue algorithm, probing
``Out(b)`` against per-source candidate sets.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from sortedcontainers import SortedList

from .errors import AlreadyOne, BadParams, BlockCapExceeded, OverlapViolation

BLOCK_CAP = 8          # inter-curve rows; bipartite rows always get 1
PROBES = ("rows", "intervals")
PREDECESSORS = ("bitset", "sorted")


def _bits(x: int):
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def _runs(x: int, gaps: int) -> list[tuple[int, int]]:
    """Maximal runs of ``x`` once positions outside ``x | gaps`` are ignored.

    Returns half-open position intervals; an interval may straddle positions
    that are in neither set (inactive columns).
    """
    out = []
    while x:
        lo = (x & -x).bit_length() - 1
        g = gaps & -(1 << lo)
        if not g:
            out.append((lo, x.bit_length()))
            break
        hi = (g & -g).bit_length() - 1
        out.append((lo, hi))
        x &= -(1 << hi)
    return out


# ---------------------------------------------------------------------------
# orders and partitions


class CurveOrder:
    """Groups of vertices, one per curve, concatenated into a single order."""

    def __init__(self, groups: Iterable[Sequence[int]]):
        self.groups: list[tuple[int, ...]] = [tuple(g) for g in groups if len(g)]
        self.elements: list[int] = [v for g in self.groups for v in g]
        self.pos: dict[int, int] = {}
        for i, v in enumerate(self.elements):
            if v in self.pos:
                raise OverlapViolation(f"vertex {v} listed twice")
            self.pos[v] = i
        self.ranges: list[tuple[int, int]] = []
        self.curve_of: list[int] = []
        lo = 0
        for c, g in enumerate(self.groups):
            self.ranges.append((lo, lo + len(g)))
            self.curve_of.extend([c] * len(g))
            lo += len(g)

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def ell(self) -> int:
        return len(self.groups)

    def precedes(self, u: int, v: int) -> bool:
        return self.pos[u] < self.pos[v]


def _halving(lo: int, hi: int, out: list[tuple[int, int, int, int]]) -> None:
    stack = [(lo, hi)]
    while stack:
        lo, hi = stack.pop()
        k = hi - lo
        if k < 2:
            continue
        q = lo + (k + 1) // 2
        out.append((lo, q, q, hi))
        out.append((q, hi, lo, q))
        stack.append((q, hi))
        stack.append((lo, q))


def partition_single_curve(seq: Sequence[int]) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Recursive halving of one curve's sequence into (S, T) pairs."""
    seq = list(seq)
    if not seq:
        raise BadParams("a curve needs at least one element")
    spans: list[tuple[int, int, int, int]] = []
    _halving(0, len(seq), spans)
    return [(tuple(seq[a:b]), tuple(seq[c:d])) for a, b, c, d in spans]


def projection_bound(order: CurveOrder) -> int:
    biggest = max((len(g) for g in order.groups), default=1)
    return math.ceil(math.log2(biggest)) + order.ell - 1 if biggest > 1 else order.ell - 1


@dataclass(slots=True)
class Member:
    idx: int
    kind: str            # "bipartite" or "inter"
    s0: int
    s1: int
    t0: int
    t1: int
    cap: int
    smask: int = 0
    tmask: int = 0

    def __post_init__(self):
        self.smask = ((1 << self.s1) - 1) ^ ((1 << self.s0) - 1)
        self.tmask = ((1 << self.t1) - 1) ^ ((1 << self.t0) - 1)


class ReachPartition:
    """Members covering every off-diagonal position pair exactly once."""

    def __init__(self, order: CurveOrder, block_cap: int = BLOCK_CAP):
        self.order = order
        self.block_cap = block_cap
        k = len(order)
        self.k = k
        spans: list[tuple[str, int, int, int, int]] = []
        for c, (lo, hi) in enumerate(order.ranges):
            for c2, (lo2, hi2) in enumerate(order.ranges):
                if c != c2:
                    spans.append(("inter", lo, hi, lo2, hi2))
            one: list[tuple[int, int, int, int]] = []
            _halving(lo, hi, one)
            spans.extend(("bipartite",) + s for s in one)
        self.members: list[Member] = [
            Member(i, kind, a, b, c, d, 1 if kind == "bipartite" else block_cap)
            for i, (kind, a, b, c, d) in enumerate(spans)]
        self.rpi: list[list[int]] = [[] for _ in range(k)]
        self.cpi: list[list[int]] = [[] for _ in range(k)]
        mid = [-1] * (k * k)
        for M in self.members:
            for s in range(M.s0, M.s1):
                self.rpi[s].append(M.idx)
                base = s * k
                for t in range(M.t0, M.t1):
                    mid[base + t] = M.idx
            for t in range(M.t0, M.t1):
                self.cpi[t].append(M.idx)
        self.mid = mid

    def __len__(self) -> int:
        return len(self.members)

    def member_of(self, s: int, t: int) -> int:
        return self.mid[s * self.k + t]

    def sets(self, i: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
        M = self.members[i]
        el = self.order.elements
        return tuple(el[M.s0:M.s1]), tuple(el[M.t0:M.t1])

    def coverage_violations(self) -> list[str]:
        """Exhaustive scan: each ordered pair s != t in exactly one member."""
        k = self.k
        count = [0] * (k * k)
        for M in self.members:
            for s in range(M.s0, M.s1):
                for t in range(M.t0, M.t1):
                    count[s * k + t] += 1
        out = []
        for s in range(k):
            for t in range(k):
                want = 0 if s == t else 1
                if count[s * k + t] != want:
                    out.append(f"pair ({s},{t}) covered {count[s * k + t]} times")
        return out

    def max_projection(self) -> int:
        return max((len(x) for x in self.rpi + self.cpi), default=0)


def partition_multi_curve(order: CurveOrder, block_cap: int = BLOCK_CAP) -> ReachPartition:
    return ReachPartition(order, block_cap)


# ---------------------------------------------------------------------------
# a single member as a stand-alone matrix (validators and tests)


@dataclass
class ReachSubmatrix:
    S: tuple
    T: tuple
    kind: str
    rows: list[int]               # bit j of rows[i] is entry (S[i], T[j])
    cap: int = 1

    @classmethod
    def from_dense(cls, S, T, dense, kind="bipartite", cap=None):
        rows = [sum(1 << j for j, x in enumerate(r) if x) for r in dense]
        if cap is None:
            cap = 1 if kind == "bipartite" else BLOCK_CAP
        return cls(tuple(S), tuple(T), kind, rows, cap)

    @property
    def actcols(self) -> int:
        acc = 0
        for r in self.rows:
            acc |= r
        return acc

    def entry(self, i: int, j: int) -> int:
        return self.rows[i] >> j & 1

    def row_blocks(self, i: int) -> int:
        act = self.actcols
        return len(_runs(self.rows[i], act & ~self.rows[i]))


def verify_monge(sub: ReachSubmatrix) -> bool:
    """Ones at (a,c) and (b,d) with a before b, c before d force (a,d) and (b,c)."""
    rows = sub.rows
    for i in range(len(rows)):
        ra = rows[i]
        if not ra:
            continue
        for j in range(i + 1, len(rows)):
            rb = rows[j]
            if not rb:
                continue
            for c in _bits(ra):
                later = rb & -(1 << (c + 1))
                if later and (not rb >> c & 1 or later & ~ra):
                    return False
    return True


def verify_blocks(sub: ReachSubmatrix, cap: int | None = None) -> bool:
    limit = sub.cap if cap is None else cap
    act = sub.actcols
    return all(len(_runs(r, act & ~r)) <= limit for r in sub.rows)


# ---------------------------------------------------------------------------
# a growing matrix stored member by member


@dataclass(slots=True)
class Delta:
    """What one batch changed: new entries and newly active columns/rows (positions)."""
    new: list[tuple[int, int]] = field(default_factory=list)
    col_act: list[tuple[int, int]] = field(default_factory=list)   # (member, t)
    row_act: list[tuple[int, int]] = field(default_factory=list)   # (member, s)

    def __bool__(self) -> bool:
        return bool(self.new)


class PartitionedMatrix:
    """Monotone 0/1 matrix over a :class:`CurveOrder` with per-member bookkeeping.

    With ``track=False`` only the entries are kept; the partition, the active
    sets and the interval rows are skipped, which is all the row-probe closure
    needs.
    """

    def __init__(self, order: CurveOrder, *, block_cap: int = BLOCK_CAP, track: bool = True):
        self.order = order
        self.k = len(order)
        self.block_cap = block_cap
        self.track = track
        self.row = [0] * self.k
        self.col = [0] * self.k
        self.ones = 0
        self._part: ReachPartition | None = None
        if track:
            self._init_tracking()

    def _init_tracking(self) -> None:
        part = self.partition
        nm = len(part.members)
        self.act = [0] * nm
        self.actr = [0] * nm
        self.rint: list[dict[int, list[tuple[int, int]]]] = [dict() for _ in range(nm)]
        self.cint: list[dict[int, list[tuple[int, int]]]] = [dict() for _ in range(nm)]

    @property
    def partition(self) -> ReachPartition:
        if self._part is None:
            self._part = ReachPartition(self.order, self.block_cap)
        return self._part

    def get(self, u: int, v: int) -> bool:
        if u == v:
            return True
        p = self.order.pos
        return bool(self.row[p[u]] >> p[v] & 1)

    def pairs(self) -> list[tuple[int, int]]:
        el = self.order.elements
        return [(el[s], el[t]) for s in range(self.k) for t in _bits(self.row[s])]

    def apply_updates(self, pairs: Iterable[tuple[int, int]]) -> Delta:
        p = self.order.pos
        return self.apply_positions([(p[u], p[v]) for u, v in pairs])

    def apply_positions(self, pairs: Iterable[tuple[int, int]]) -> Delta:
        row, col = self.row, self.col
        d = Delta()
        new = d.new
        for s, t in pairs:
            if s == t or row[s] >> t & 1:
                raise AlreadyOne(f"entry ({self.order.elements[s]},{self.order.elements[t]}) is already 1")
            row[s] |= 1 << t
            col[t] |= 1 << s
            new.append((s, t))
        self.ones += len(new)
        if self.track and new:
            self._track(d)
        return d

    def _track(self, d: Delta) -> None:
        part = self.partition
        k = self.k
        mid = part.mid
        act, actr = self.act, self.actr
        touched_r: set[tuple[int, int]] = set()
        touched_c: set[tuple[int, int]] = set()
        grown_c: set[int] = set()
        grown_r: set[int] = set()
        for s, t in d.new:
            M = mid[s * k + t]
            if not act[M] >> t & 1:
                act[M] |= 1 << t
                d.col_act.append((M, t))
                grown_c.add(M)
            if not actr[M] >> s & 1:
                actr[M] |= 1 << s
                d.row_act.append((M, s))
                grown_r.add(M)
            touched_r.add((M, s))
            touched_c.add((M, t))
        members = part.members
        for M in grown_c:
            m = members[M]
            for s in _bits(actr[M]):
                touched_r.add((M, s))
        for M in grown_r:
            m = members[M]
            for t in _bits(act[M]):
                touched_c.add((M, t))
        row, col = self.row, self.col
        for M, s in touched_r:
            m = members[M]
            x = row[s] & m.tmask
            ivs = _runs(x, act[M] & ~x)
            if len(ivs) > m.cap:
                raise BlockCapExceeded(self._diag("row", M, s, len(ivs)))
            self.rint[M][s] = ivs
        for M, t in touched_c:
            m = members[M]
            x = col[t] & m.smask
            ivs = _runs(x, actr[M] & ~x)
            if len(ivs) > m.cap:
                raise BlockCapExceeded(self._diag("column", M, t, len(ivs)))
            self.cint[M][t] = ivs

    def _diag(self, what: str, M: int, i: int, nb: int) -> str:
        m = self.partition.members[M]
        return (f"{what} {self.order.elements[i]} of {m.kind} member {M} "
                f"(rows {m.s0}..{m.s1}, cols {m.t0}..{m.t1}) has {nb} blocks, cap {m.cap}")

    def snapshot(self) -> Delta:
        """All current entries as one batch, with every active column/row reported."""
        d = Delta(new=[(s, t) for s in range(self.k) for t in _bits(self.row[s])])
        if self.track:
            for M in range(len(self.act)):
                d.col_act.extend((M, t) for t in _bits(self.act[M]))
                d.row_act.extend((M, s) for s in _bits(self.actr[M]))
        return d

    def submatrix(self, M: int) -> ReachSubmatrix:
        m = self.partition.members[M]
        el = self.order.elements
        rows = [(self.row[s] & m.tmask) >> m.t0 for s in range(m.s0, m.s1)]
        return ReachSubmatrix(tuple(el[m.s0:m.s1]), tuple(el[m.t0:m.t1]), m.kind, rows, m.cap)

    def out_positions(self, s: int) -> int:
        """Row ``s`` rebuilt from the interval form (needs tracking)."""
        acc = 0
        for M in self.partition.rpi[s]:
            ivs = self.rint[M].get(s)
            if ivs:
                a = self.act[M]
                for lo, hi in ivs:
                    acc |= a & ((1 << hi) - 1) & -(1 << lo)
        return acc


# ---------------------------------------------------------------------------
# predecessor structures for candidate sets


class SortedPred:
    """Ordered-set candidates (O(log m) per operation)."""
    __slots__ = ("s",)

    def __init__(self):
        self.s = SortedList()

    def add(self, x: int) -> None:
        self.s.add(x)

    def discard(self, x: int) -> None:
        self.s.discard(x)

    def range_mask(self, lo: int, hi: int) -> int:
        acc = 0
        for x in self.s.irange(lo, hi - 1):
            acc |= 1 << x
        return acc

    def mask(self) -> int:
        acc = 0
        for x in self.s:
            acc |= 1 << x
        return acc


class BitsetPred:
    """Flat bitset candidates: word-parallel range extraction."""
    __slots__ = ("b",)

    def __init__(self):
        self.b = 0

    def add(self, x: int) -> None:
        self.b |= 1 << x

    def discard(self, x: int) -> None:
        self.b &= ~(1 << x)

    def range_mask(self, lo: int, hi: int) -> int:
        return self.b & ((1 << hi) - 1) & -(1 << lo)

    def mask(self) -> int:
        return self.b


_PRED = {"bitset": BitsetPred, "sorted": SortedPred}


# ---------------------------------------------------------------------------
# the closure of G(A1) + G(A2)


class MergeClosure:
    """Closure over ``U1 | U2`` of the union of two monotone matrices.

    ``probe="rows"`` computes ``Out(b) & Unreachable(a)`` with one mask on the
    stored rows.  ``probe="intervals"`` keeps candidate sets per source and
    member and reads them inside the interval form of ``Out_b`` (both input
    matrices must then be tracked).  The two give identical results.
    """

    def __init__(self, side1: PartitionedMatrix, side2: PartitionedMatrix, *,
                 probe: str = "rows", pred: str = "bitset",
                 shared: Iterable[int] | None = None, check: bool = False):
        if probe not in PROBES:
            raise BadParams(f"probe must be one of {PROBES}")
        if pred not in PREDECESSORS:
            raise BadParams(f"pred must be one of {PREDECESSORS}")
        self.sides = (side1, side2)
        self.probe = probe
        self.pred = pred
        self.check = check
        if shared is not None:
            both = set(side1.order.pos) & set(side2.order.pos)
            bad = [v for v in shared if v not in both]
            if bad:
                raise OverlapViolation(f"shared vertices {bad[:5]} are not on both boundaries")
        U = list(side1.order.elements)
        gid = {v: i for i, v in enumerate(U)}
        for v in side2.order.elements:
            if v not in gid:
                gid[v] = len(U)
                U.append(v)
        self.U = U
        self.gid = gid
        m = len(U)
        self.m = m
        self.gmap = [[gid[v] for v in s.order.elements] for s in self.sides]
        # global id -> local position on each side (-1 when absent)
        self.lpos = []
        for i, s in enumerate(self.sides):
            lp = [-1] * m
            for t, g in enumerate(self.gmap[i]):
                lp[g] = t
            self.lpos.append(lp)
        self.row = [1 << i for i in range(m)]
        self.col = [1 << i for i in range(m)]
        self.outg = [0] * m
        self.ing = [0] * m
        self.pushes = 0
        self.flips = 0
        self.cand_adds = 0
        self.cand_removals = 0
        if probe == "intervals":
            for s in self.sides:
                if not s.track:
                    raise BadParams("interval probing needs tracked input matrices")
            P = _PRED[pred]
            self.can = [[[P() for _ in range(m)] for _ in s.partition.members] for s in self.sides]
            self.cr = [[[P() for _ in range(m)] for _ in s.partition.members] for s in self.sides]
        self._initial = [s.snapshot() for s in self.sides]
        if self._initial[0] or self._initial[1]:
            self.update_ids([(0, self._initial[0]), (1, self._initial[1])])

    # -- queries -----------------------------------------------------------

    def reaches(self, u: int, v: int) -> bool:
        return bool(self.row[self.gid[u]] >> self.gid[v] & 1)

    def closure_pairs(self) -> set[tuple[int, int]]:
        U = self.U
        return {(U[a], U[x]) for a in range(self.m) for x in _bits(self.row[a]) if a != x}

    # -- updates -----------------------------------------------------------

    def update(self, batches: Sequence[tuple[int, Delta]]) -> list[tuple[int, int]]:
        """Feed per-side deltas; returns the newly reachable vertex pairs."""
        U = self.U
        return [(U[a], U[x]) for a, x in self.update_ids(batches)]

    def update_ids(self, batches: Sequence[tuple[int, Delta]]) -> list[tuple[int, int]]:
        row, col, outg, ing = self.row, self.col, self.outg, self.ing
        faithful = self.probe == "intervals"
        eplus = []
        for side, d in batches:
            gm = self.gmap[side]
            for s, t in d.new:
                a = gm[s]
                b = gm[t]
                outg[a] |= 1 << b
                ing[b] |= 1 << a
                eplus.append((a, b))
            if faithful:
                self._activate(side, d)
        flipped: list[tuple[int, int]] = []
        q = deque()
        for a, b in eplus:
            if not row[a] >> b & 1:
                self._set(a, b, flipped)
                q.append((a, b))
        self.pushes += len(q)
        while q:
            a, b = q.popleft()
            if faithful:
                x = self._out_candidates(a, b)
            else:
                x = outg[b] & ~row[a]
            if x:
                ba = 1 << a
                if faithful:
                    for t in _bits(x):
                        self._set(a, t, flipped)
                        q.append((a, t))
                        self.pushes += 1
                else:
                    row[a] |= x
                    n0 = len(q)
                    while x:
                        low = x & -x
                        t = low.bit_length() - 1
                        x ^= low
                        col[t] |= ba
                        flipped.append((a, t))
                        q.append((a, t))
                    self.pushes += len(q) - n0
            if faithful:
                y = self._in_candidates(a, b)
            else:
                y = ing[a] & ~col[b]
            if y:
                bb = 1 << b
                if faithful:
                    for s in _bits(y):
                        self._set(s, b, flipped)
                        q.append((s, b))
                        self.pushes += 1
                else:
                    col[b] |= y
                    n0 = len(q)
                    while y:
                        low = y & -y
                        s = low.bit_length() - 1
                        y ^= low
                        row[s] |= bb
                        flipped.append((s, b))
                        q.append((s, b))
                    self.pushes += len(q) - n0
        self.flips += len(flipped)
        return flipped

    def _set(self, a: int, x: int, flipped: list) -> None:
        self.row[a] |= 1 << x
        self.col[x] |= 1 << a
        flipped.append((a, x))
        if self.probe == "intervals":
            for i, side in enumerate(self.sides):
                t = self.lpos[i][x]
                if t >= 0:
                    cans = self.can[i]
                    for M in side.partition.cpi[t]:
                        cans[M][a].discard(t)
                        self.cand_removals += 1
                s = self.lpos[i][a]
                if s >= 0:
                    crs = self.cr[i]
                    for M in side.partition.rpi[s]:
                        crs[M][x].discard(s)
                        self.cand_removals += 1

    def _activate(self, side: int, d: Delta) -> None:
        gm = self.gmap[side]
        row, col = self.row, self.col
        for M, t in d.col_act:
            g = gm[t]
            cans = self.can[side][M]
            for a in range(self.m):
                if not row[a] >> g & 1:
                    cans[a].add(t)
                    self.cand_adds += 1
        for M, s in d.row_act:
            g = gm[s]
            crs = self.cr[side][M]
            for b in range(self.m):
                if not col[b] >> g & 1:
                    crs[b].add(s)
                    self.cand_adds += 1

    def _out_candidates(self, a: int, b: int) -> int:
        """Out(b) & Unreachable(a) assembled member by member from candidate sets."""
        acc = 0
        for i, side in enumerate(self.sides):
            s = self.lpos[i][b]
            if s < 0:
                continue
            gm = self.gmap[i]
            cans = self.can[i]
            for M in side.partition.rpi[s]:
                ivs = side.rint[M].get(s)
                if not ivs:
                    continue
                c = cans[M][a]
                for lo, hi in ivs:
                    for t in _bits(c.range_mask(lo, hi)):
                        acc |= 1 << gm[t]
        if self.check:
            want = self.outg[b] & ~self.row[a]
            assert acc == want, (a, b)
        return acc

    def _in_candidates(self, a: int, b: int) -> int:
        """In(a) & CannotReach(b), the column-side mirror of the above."""
        acc = 0
        for i, side in enumerate(self.sides):
            t = self.lpos[i][a]
            if t < 0:
                continue
            gm = self.gmap[i]
            crs = self.cr[i]
            for M in side.partition.cpi[t]:
                ivs = side.cint[M].get(t)
                if not ivs:
                    continue
                c = crs[M][b]
                for lo, hi in ivs:
                    for s in _bits(c.range_mask(lo, hi)):
                        acc |= 1 << gm[s]
        if self.check:
            want = self.ing[a] & ~self.col[b]
            assert acc == want, (a, b)
        return acc

    def candidates_intersect(self, a: int, b: int) -> set[int]:
        """Out(b) minus the vertices already reachable from ``a`` (vertex ids)."""
        ga, gb = self.gid[a], self.gid[b]
        if self.probe == "intervals":
            x = self._out_candidates(ga, gb)
        else:
            x = self.outg[gb] & ~self.row[ga]
        return {self.U[t] for t in _bits(x)}

    # -- test-only checks --------------------------------------------------

    def candidate_violations(self) -> list[str]:
        """can_a(M) == actcols(M) minus Unreachable-complement, for every a and M."""
        if self.probe != "intervals":
            return []
        out = []
        for i, side in enumerate(self.sides):
            gm = self.gmap[i]
            for M in range(len(side.partition.members)):
                act = side.act[M]
                actr = side.actr[M]
                for a in range(self.m):
                    want = 0
                    for t in _bits(act):
                        if not self.row[a] >> gm[t] & 1:
                            want |= 1 << t
                    if self.can[i][M][a].mask() != want:
                        out.append(f"side {i} member {M} source {self.U[a]}: candidate set drifted")
                    want = 0
                    for s in _bits(actr):
                        if not self.col[a] >> gm[s] & 1:
                            want |= 1 << s
                    if self.cr[i][M][a].mask() != want:
                        out.append(f"side {i} member {M} target {self.U[a]}: cannot-reach set drifted")
        return out


def merge_closure_new(part1: PartitionedMatrix, part2: PartitionedMatrix,
                      shared: Iterable[int] | None = None, **kw) -> MergeClosure:
    return MergeClosure(part1, part2, shared=shared, **kw)
