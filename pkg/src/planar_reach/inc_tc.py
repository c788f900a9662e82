"""Incremental transitive closure over a fixed embedding.

Only the ``In`` matrices are maintained.  A query ``u -> w`` runs a BFS over a
small view assembled on the fly: the on-edges of the leaves holding ``u`` and
``w``, plus the graphs of ``In(sib(H))`` for every non-root ancestor ``H`` of
those two leaves.  Any path in the full on-subgraph can be shortcut through
that view, so the BFS answer is exact.

:class:`ContractionTC` adds edge contraction: every edge gets a reverse copy
that starts off, and contracting an edge switches its reverse copy on.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .decomposition import HOLE_CAP, LEAF_THRESHOLD, build_simple_decomposition
from .errors import AlreadyContracted, UnknownEdge, UnknownVertex
from .monge import BLOCK_CAP, _bits
from .plane_graph import PlaneMultigraph
from .switch_on import SwitchOnReach


@dataclass
class QueryStats:
    visited: int = 0
    members: int = 0
    total_rows: int = 0
    total_actcols: int = 0
    candidate_removals: int = 0


class IncTC:
    """Reachability between arbitrary vertex pairs while edges are switched on."""

    def __init__(self, g: PlaneMultigraph, *, leaf_threshold: int = LEAF_THRESHOLD,
                 hole_cap: int = HOLE_CAP, block_cap: int = BLOCK_CAP,
                 probe: str = "rows", track: bool | None = None):
        self.g = g
        self.aug, self.tree = build_simple_decomposition(
            g, leaf_threshold=leaf_threshold, hole_cap=hole_cap)
        self.sw = SwitchOnReach(self.tree, self.aug, maintain_ex=False, probe=probe,
                                track=track, block_cap=block_cap)
        self.leaf_of_vertex: dict[int, int] = {}
        for x in sorted(self.sw.leaf_of_piece):
            for v in self.sw.leaf_of_piece[x].verts:
                self.leaf_of_vertex.setdefault(v, x)
        self.last = QueryStats()

    def switch_on(self, e: int) -> None:
        self.sw.switch_on(e)

    def switch_on_batch(self, edges) -> None:
        self.sw.switch_on_batch(edges)

    def _rep(self, v: int) -> int:
        if not 0 <= v < self.g.n:
            raise UnknownVertex(f"vertex {v}")
        return self.aug.S[v][0]

    def reachable(self, u: int, w: int) -> bool:
        ru, rw = self._rep(u), self._rep(w)
        if u == w:
            return True
        return self.reachable_internal(ru, rw)

    def drg_members(self, a: int, b: int) -> tuple[int, int, list[int]]:
        """Leaves holding ``a`` and ``b`` and the pieces whose In-graphs join the view."""
        tree = self.tree
        la, lb = self.leaf_of_vertex[a], self.leaf_of_vertex[b]
        members = set()
        for x in tree.ancestors(la) + tree.ancestors(lb):
            if x != tree.root:
                members.add(tree.sibling(x))
        return la, lb, sorted(members)

    def drg_boundary(self, a: int, b: int) -> set[int]:
        """Union of the boundaries of all ancestors of the two leaves."""
        tree = self.tree
        la, lb = self.leaf_of_vertex[a], self.leaf_of_vertex[b]
        out: set[int] = set()
        for x in set(tree.ancestors(la) + tree.ancestors(lb)):
            out.update(self.sw.order[x].elements)
        return out

    def reachable_internal(self, a: int, b: int) -> bool:
        """BFS over the dense reachability view between vertices of the decomposed graph."""
        if a == b:
            return True
        sw = self.sw
        la, lb, members = self.drg_members(a, b)
        adj: dict[int, list[int]] = {}
        for x in {la, lb}:
            lf = sw.leaf_of_piece[x]
            vs = lf.verts
            for e, s, t in lf.edges:
                if e in lf.on:
                    adj.setdefault(vs[s], []).append(vs[t])
        mats = []
        st = QueryStats(members=len(members))
        for x in members:
            M = sw.In[x]
            act = 0
            for c in range(M.k):
                if M.col[c]:
                    act |= 1 << c
            st.total_rows += M.k
            st.total_actcols += bin(act).count("1")
            mats.append((M.row, sw.order[x].pos, sw.order[x].elements, [act]))
        visited = {a}
        dq = deque([a])

        def visit(y: int) -> None:
            visited.add(y)
            dq.append(y)
            for _, pos, _, cand in mats:
                p = pos.get(y)
                if p is not None and cand[0] >> p & 1:
                    cand[0] ^= 1 << p
                    st.candidate_removals += 1

        for _, pos, _, cand in mats:
            p = pos.get(a)
            if p is not None and cand[0] >> p & 1:
                cand[0] ^= 1 << p
                st.candidate_removals += 1
        found = False
        while dq and not found:
            v = dq.popleft()
            for y in adj.get(v, ()):
                if y not in visited:
                    visit(y)
            for row, pos, els, cand in mats:
                p = pos.get(v)
                if p is None:
                    continue
                hit = row[p] & cand[0]
                for t in _bits(hit):
                    y = els[t]
                    if y not in visited:
                        visit(y)
            found = b in visited
        st.visited = len(visited)
        self.last = st
        return found


class ContractionTC:
    """Reachability in a multigraph whose edges get contracted one at a time."""

    def __init__(self, g: PlaneMultigraph, **kw):
        self.g = g
        self.m = g.m
        self.gsw = g.with_reverse_edges()
        self.tc = IncTC(self.gsw, **kw)
        self.tc.switch_on_batch(range(g.m))
        self.contracted = [False] * g.m

    def contract(self, e: int) -> None:
        if not 0 <= e < self.m:
            raise UnknownEdge(f"edge {e}")
        if self.contracted[e]:
            raise AlreadyContracted(f"edge {e} was already contracted")
        self.contracted[e] = True
        self.tc.switch_on(self.m + e)

    def c_reachable(self, u: int, w: int) -> bool:
        return self.tc.reachable(u, w)
