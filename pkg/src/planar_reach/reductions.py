"""Decremental problems on plane digraphs reduced to switch-on reachability.

Deleting a primal edge ``e`` contracts its dual edge ``e*``.  Contraction is
simulated by switching on a reverse copy of ``e*`` in the graph
``H = dual + reverse edges``.  A primal edge is inter-SCC exactly when its
dual edge lies on a directed cycle, i.e. when the head of ``e*`` reaches its
tail among the on-edges of ``H``.

Layers built on top of that:

* :class:`DecInterSCC` maintains the inter-SCC edge set,
* :class:`DecSCC` keeps a shadow graph of intra-SCC edges whose connected
  components are the SCCs,
* :class:`DecSSR` maintains the condensation DAG and prunes unreachable nodes,
* :class:`DecStrongBridges` and :class:`Dec2ECS` add the per-edge avoid test.
"""

from __future__ import annotations

import logging
from collections import deque

from .augment import connect
from .decomposition import HOLE_CAP, LEAF_THRESHOLD, build_simple_decomposition
from .errors import AlreadyDeleted, UnknownEdge, UnknownVertex
from .monge import BLOCK_CAP
from .plane_graph import PlaneMultigraph, dual
from .switch_on import SwitchOnReach

log = logging.getLogger(__name__)


class DecInterSCC:
    """Inter-SCC edges of a plane digraph under edge deletions."""

    def __init__(self, g: PlaneMultigraph, *, track_bridges: bool = False,
                 leaf_threshold: int = LEAF_THRESHOLD, hole_cap: int = HOLE_CAP,
                 block_cap: int = BLOCK_CAP, probe: str = "rows"):
        self.g = g
        self.n, self.m = g.n, g.m
        conn = connect(g)
        # filler edges (ids >= g.m) join components; they are bridges of the
        # undirected graph, so their duals are loops and never matter
        self.primal = conn.graph
        self.mc = self.primal.m
        dg = dual(self.primal)
        self.dual_graph = dg.graph
        self.H = dg.graph.with_reverse_edges()
        self.aug, self.tree = build_simple_decomposition(
            self.H, leaf_threshold=leaf_threshold, hole_cap=hole_cap)
        avoid = [self.aug.p[e] for e in range(self.m)] if track_bridges else None
        self.sw = SwitchOnReach(self.tree, self.aug, block_cap=block_cap, probe=probe,
                                avoid_edges=avoid)
        self.sw.switch_on_batch(range(self.mc))
        self.sw.take_avoid_flips()
        self.deleted = [False] * self.m
        self.inter = [self.sw.query_edge_reachable(e) for e in range(self.m)]
        self.last_avoid_flips: list[int] = []

    def _check_edge(self, e: int) -> None:
        if not 0 <= e < self.m:
            raise UnknownEdge(f"edge {e}")
        if self.deleted[e]:
            raise AlreadyDeleted(f"edge {e} was already deleted")

    def delete(self, e: int) -> list[int]:
        """Delete ``e``; returns the live edges that just became inter-SCC."""
        self._check_edge(e)
        self.deleted[e] = True
        flipped = self.sw.switch_on(self.mc + e)
        out = []
        for f in flipped:
            if f < self.m and not self.deleted[f] and not self.inter[f]:
                self.inter[f] = True
                out.append(f)
        self.last_avoid_flips = [f for f in self.sw.take_avoid_flips() if f < self.m]
        return out

    def is_inter(self, e: int) -> bool:
        self._check_edge(e)
        return self.inter[e]

    def inter_set(self) -> set[int]:
        return {e for e in range(self.m) if not self.deleted[e] and self.inter[e]}

    def avoid(self, e: int) -> bool:
        """Does tail(e*) reach head(e*) in the current dual without using e*?"""
        return self.sw.query_avoid(e)

    def live_edges(self) -> list[tuple[int, int] | None]:
        g = self.g
        return [None if self.deleted[e] else (g.tail[e], g.head[e]) for e in range(self.m)]


class DecSCC:
    """Strongly connected components under deletions, with O(1) same-component queries."""

    def __init__(self, g: PlaneMultigraph, *, track_bridges: bool = False, **kw):
        self.core = DecInterSCC(g, track_bridges=track_bridges, **kw)
        self.g = g
        n = g.n
        self.adj: list[set[int]] = [set() for _ in range(n)]
        self.inc: list[list[int]] = [[] for _ in range(n)]
        for e in range(g.m):
            t, h = g.tail[e], g.head[e]
            self.inc[t].append(e)
            if h != t:
                self.inc[h].append(e)
            if not self.core.inter[e]:
                self._link(e)
        self.label = [-1] * n
        self.members: dict[int, set[int]] = {}
        self._next = 0
        for v in range(n):
            if self.label[v] == -1:
                comp = self._component(v)
                lab = self._fresh()
                for x in comp:
                    self.label[x] = lab
                self.members[lab] = comp
        self.relabel_touches = 0
        self.search_steps = 0
        self.last_splits: list[tuple[int, int, set[int]]] = []

    def _fresh(self) -> int:
        self._next += 1
        return self._next - 1

    def _link(self, e: int) -> None:
        t, h = self.g.tail[e], self.g.head[e]
        if t != h:
            self.adj[t].add(e)
            self.adj[h].add(e)

    def _other(self, e: int, v: int) -> int:
        t = self.g.tail[e]
        return self.g.head[e] if t == v else t

    def _component(self, v: int) -> set[int]:
        seen = {v}
        stack = [v]
        while stack:
            x = stack.pop()
            for e in self.adj[x]:
                y = self._other(e, x)
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return seen

    def _unlink(self, e: int) -> None:
        t, h = self.g.tail[e], self.g.head[e]
        if t == h:
            return
        self.adj[t].discard(e)
        self.adj[h].discard(e)
        self._split_check(t, h)

    def _split_check(self, a: int, b: int) -> None:
        """Search from both endpoints in lockstep; relabel the side that runs out first."""
        seen = ({a}, {b})
        stacks = ([a], [b])
        side = 0
        while True:
            st = stacks[side]
            if not st:
                break
            x = st.pop()
            mine, theirs = seen[side], seen[1 - side]
            for e in self.adj[x]:
                self.search_steps += 1
                y = self._other(e, x)
                if y in theirs:
                    return
                if y not in mine:
                    mine.add(y)
                    st.append(y)
            side = 1 - side
        small = seen[side]
        old = self.label[a]
        new = self._fresh()
        for x in small:
            self.label[x] = new
        self.relabel_touches += len(small)
        self.members[old] -= small
        self.members[new] = small
        self.last_splits.append((old, new, small))

    def delete(self, e: int) -> list[int]:
        """Delete ``e``; returns edges that just became inter-SCC."""
        was_intra = 0 <= e < self.g.m and not self.core.deleted[e] and not self.core.inter[e]
        newly = self.core.delete(e)
        self.last_splits = []
        if was_intra:
            self._unlink(e)
        for f in newly:
            self._unlink(f)
        return newly

    def _vertex(self, v: int) -> None:
        if not 0 <= v < self.g.n:
            raise UnknownVertex(f"vertex {v}")

    def same_scc(self, u: int, v: int) -> bool:
        self._vertex(u)
        self._vertex(v)
        return self.label[u] == self.label[v]

    def scc_members(self, u: int) -> set[int]:
        self._vertex(u)
        return set(self.members[self.label[u]])

    def scc_count(self) -> int:
        return sum(1 for s in self.members.values() if s)

    def partition(self) -> list[frozenset[int]]:
        return sorted((frozenset(s) for s in self.members.values() if s), key=min)


class DecSSR:
    """Single-source reachability under deletions via the condensation DAG."""

    def __init__(self, g: PlaneMultigraph, s: int, **kw):
        if not 0 <= s < g.n:
            raise UnknownVertex(f"source {s}")
        self.scc = DecSCC(g, **kw)
        self.g = g
        self.s = s
        self.contrib: dict[int, tuple[int, int]] = {}
        self.node_out: dict[int, set[int]] = {}
        self.indeg: dict[int, int] = {}
        self.alive: dict[int, bool] = {}
        self.dag_insertions = 0
        lab = self.scc.label
        # reachable nodes first, then count edges leaving them
        src = lab[s]
        for node in self.scc.members:
            self.alive[node] = False
            self.indeg[node] = 0
            self.node_out[node] = set()
        self.alive[src] = True
        queue = deque([src])
        out_edges: dict[int, list[int]] = {}
        for e in range(g.m):
            t, h = lab[g.tail[e]], lab[g.head[e]]
            if t != h:
                out_edges.setdefault(t, []).append(e)
        while queue:
            x = queue.popleft()
            for e in out_edges.get(x, ()):
                y = lab[g.head[e]]
                if not self.alive[y]:
                    self.alive[y] = True
                    queue.append(y)
        for e in range(g.m):
            self._count(e)

    def _count(self, e: int) -> None:
        if self.scc.core.deleted[e] or e in self.contrib:
            return
        lab = self.scc.label
        t, h = lab[self.g.tail[e]], lab[self.g.head[e]]
        if t == h or not self.alive[t]:
            return
        self.contrib[e] = (t, h)
        self.node_out[t].add(e)
        self.indeg[h] += 1
        self.dag_insertions += 1

    def _uncount(self, e: int) -> int | None:
        c = self.contrib.pop(e, None)
        if c is None:
            return None
        t, h = c
        self.node_out[t].discard(e)
        self.indeg[h] -= 1
        return h

    def delete(self, e: int) -> list[int]:
        """Delete ``e``; returns the vertices that just became unreachable from the source."""
        self.scc.delete(e)
        affected = {e}
        inc = self.scc.inc
        candidates = set()
        for old, new, moved in self.scc.last_splits:
            self.alive[new] = self.alive[old]
            self.indeg[new] = 0
            self.node_out[new] = set()
            self.dag_insertions += 1
            candidates.add(old)
            candidates.add(new)
            for v in moved:
                affected.update(inc[v])
        for f in affected:
            h = self._uncount(f)
            if h is not None:
                candidates.add(h)
        for f in affected:
            self._count(f)
        src = self.scc.label[self.s]
        lost: list[int] = []
        stack = [x for x in candidates if self.alive[x] and self.indeg[x] == 0 and x != src]
        while stack:
            x = stack.pop()
            if not self.alive[x] or self.indeg[x] != 0 or x == src:
                continue
            self.alive[x] = False
            lost.extend(self.scc.members[x])
            for f in list(self.node_out[x]):
                h = self._uncount(f)
                if h is not None and self.alive[h] and self.indeg[h] == 0 and h != src:
                    stack.append(h)
        return sorted(lost)

    def reachable(self, v: int) -> bool:
        if not 0 <= v < self.g.n:
            raise UnknownVertex(f"vertex {v}")
        return self.alive[self.scc.label[v]]

    def reachable_set(self) -> set[int]:
        return {v for v in range(self.g.n) if self.alive[self.scc.label[v]]}


class DecStrongBridges(DecSCC):
    """Strong bridges under deletions.

    A live edge is a strong bridge iff it is intra-SCC and, in the dual with
    the current contractions applied, ``tail(e*)`` reaches ``head(e*)``
    without ``e*``.
    """

    def __init__(self, g: PlaneMultigraph, **kw):
        super().__init__(g, track_bridges=True, **kw)
        self.bridges: set[int] = set()
        for e in range(g.m):
            self._refresh(e)

    def _refresh(self, e: int) -> bool:
        core = self.core
        is_b = (not core.deleted[e] and not core.inter[e]
                and self.g.tail[e] != self.g.head[e] and core.avoid(e))
        if is_b:
            self.bridges.add(e)
        else:
            self.bridges.discard(e)
        return is_b

    def delete(self, e: int) -> tuple[set[int], set[int]]:
        """Delete ``e``; returns (bridges gained, bridges lost)."""
        before = set(self.bridges)
        newly = super().delete(e)
        for f in [e, *newly, *self.core.last_avoid_flips]:
            self._refresh(f)
        return self.bridges - before, before - self.bridges

    def strong_bridges(self) -> set[int]:
        return set(self.bridges)


class Dec2ECS(DecStrongBridges):
    """Maximal 2-edge-connected subgraphs: strong bridges are deleted as soon as they appear."""

    def __init__(self, g: PlaneMultigraph, *, order: str = "fifo", **kw):
        super().__init__(g, **kw)
        self.order = order
        self.user_deleted = [False] * g.m
        self.cascade_deletions = 0
        self._cascade(list(sorted(self.bridges)))

    def _cascade(self, work: list[int]) -> None:
        dq = deque(work)
        while dq:
            f = dq.popleft() if self.order == "fifo" else dq.pop()
            if f not in self.bridges:
                continue
            gained, _ = DecStrongBridges.delete(self, f)
            self.cascade_deletions += 1
            dq.extend(sorted(gained))

    def delete(self, e: int) -> tuple[set[int], set[int]]:
        if 0 <= e < self.g.m and self.user_deleted[e]:
            raise AlreadyDeleted(f"edge {e} was already deleted")
        if 0 <= e < self.g.m:
            self.user_deleted[e] = True
        if 0 <= e < self.g.m and self.core.deleted[e]:
            # already removed by an earlier cascade
            return set(), set()
        gained, lost = DecStrongBridges.delete(self, e)
        self._cascade(sorted(gained))
        return gained, lost

    def twoecs_partition(self) -> list[frozenset[int]]:
        return self.partition()
