"""Switch-on reachability over a simple recursive decomposition.

Per piece ``X`` (root excluded) two boundary matrices are kept:

* ``In(X)``: reachability between boundary vertices inside ``X`` using on-edges,
* ``Ex(X)``: the same inside the complement ``G - X``.

Per leaf ``L`` there are two small dense matrices over all of ``V(L)``:
``In*(L)`` (closure of ``L`` restricted to on-edges) and ``R(L)`` (closure of
``G(In*(L)) + G(Ex(L))``, which equals full on-reachability between the
vertices of ``L``).

An internal ``In(X)`` is the boundary part of a :class:`MergeClosure` over the
two children's ``In``; ``Ex(X)`` is the boundary part of a closure over the
parent's ``Ex`` and the sibling's ``In``.  Changes travel as explicit deltas
through a priority queue ordered by the dependency list
``In* < In (bottom-up) < Ex (top-down) < R``.
"""

from __future__ import annotations

import heapq
import logging
from dataclasses import dataclass

from .augment import AugmentedGraph
from .decomposition import DecompTree, validate_simple
from .errors import AlreadyOn, NotSimple, UnknownEdge
from .monge import BLOCK_CAP, CurveOrder, Delta, MergeClosure, PartitionedMatrix, _bits

log = logging.getLogger(__name__)

INSTAR, IN, EX, R = 0, 1, 2, 3
KIND_NAMES = ("In*", "In", "Ex", "R")


def leaf_closure(rows: list[int]) -> list[int]:
    """Reflexive-transitive closure of successor bitmasks (Warshall over bit rows)."""
    reach = [r | (1 << i) for i, r in enumerate(rows)]
    for j in range(len(reach)):
        bj = 1 << j
        rj = reach[j]
        reach = [r | rj if r & bj else r for r in reach]
    return reach


class _Leaf:
    __slots__ = ("pid", "verts", "local", "edges", "on", "instar", "rrows",
                 "bmap", "tracked", "avoid", "ex_local")

    def __init__(self, pid, verts, g, edges, bnd_elements):
        self.pid = pid
        self.verts = verts
        self.local = {v: i for i, v in enumerate(verts)}
        loc = self.local
        self.edges = [(e, loc[g.tail[e]], loc[g.head[e]]) for e in edges]
        self.on: set[int] = set()
        k = len(verts)
        self.instar = [1 << i for i in range(k)]
        self.rrows = [1 << i for i in range(k)]
        self.bmap = [loc[v] for v in bnd_elements]
        self.tracked: list[tuple[int, int, int]] = []
        self.avoid: dict[int, bool] = {}
        self.ex_local = [0] * k


@dataclass
class Counters:
    queue_pushes: int = 0
    queue_pops: int = 0
    matrix_flips: int = 0
    closure_pushes: int = 0
    closure_flips: int = 0
    leaf_recomputes: int = 0


class SwitchOnReach:
    """Maintains, for every edge uw of the decomposed graph, whether w reaches u.

    ``aug`` maps the edges of an original graph onto the decomposed one; when
    given, :meth:`switch_on` and :meth:`query_edge_reachable` speak original
    edge ids and the ``E0`` edges are switched on during construction.
    """

    def __init__(self, tree: DecompTree, aug: AugmentedGraph | None = None, *,
                 maintain_ex: bool = True, probe: str = "rows", track: bool | None = None,
                 block_cap: int = BLOCK_CAP, pred: str = "bitset", avoid_edges=None,
                 validate: bool = False, check: bool = False):
        if validate:
            bad = validate_simple(tree)
            if bad:
                raise NotSimple("; ".join(bad[:5]))
        elif not tree.simple:
            raise NotSimple("decomposition is not marked simple")
        self.tree = tree
        self.aug = aug
        self.g = g = tree.graph
        self.maintain_ex = maintain_ex
        self.probe = probe
        if track is None:
            track = probe == "intervals"
        self.track = track
        self.counters = Counters()
        pieces = tree.pieces
        npieces = len(pieces)
        vsets = getattr(tree, "vertex_sets", None)
        self.order = [CurveOrder(p.bnd_groups) for p in pieces]
        mk = dict(block_cap=block_cap, track=track)
        self.In = [PartitionedMatrix(o, **mk) for o in self.order]
        self.Ex = [PartitionedMatrix(o, **mk) for o in self.order] if maintain_ex else None
        self.leaf_of_piece: dict[int, _Leaf] = {}
        self.leaf_of_edge = [-1] * g.m
        avoid_set = set(avoid_edges or ())
        for p in pieces:
            if p.is_leaf:
                vs = sorted(vsets[p.id]) if vsets is not None else sorted(tree.vertex_set(p.id))
                lf = _Leaf(p.id, vs, g, p.edges, self.order[p.id].elements)
                for e, a, b in lf.edges:
                    self.leaf_of_edge[e] = p.id
                    if e in avoid_set:
                        lf.tracked.append((e, a, b))
                        lf.avoid[e] = False
                self.leaf_of_piece[p.id] = lf
        root = tree.root
        mc = dict(probe=probe, pred=pred, check=check)
        self.mc_in: dict[int, MergeClosure] = {}
        self.mc_ex: dict[int, MergeClosure] = {}
        self.to_in: dict[int, list[int]] = {}
        self.to_ex: dict[int, list[int]] = {}
        for p in pieces:
            if not p.is_leaf and p.id != root:
                c1, c2 = p.children
                m = MergeClosure(self.In[c1], self.In[c2], **mc)
                self.mc_in[p.id] = m
                self.to_in[p.id] = [self.order[p.id].pos.get(v, -1) for v in m.U]
            if maintain_ex and p.id != root:
                par = p.parent
                sib = tree.sibling(p.id)
                m = MergeClosure(self.Ex[par], self.In[sib], **mc)
                self.mc_ex[p.id] = m
                self.to_ex[p.id] = [self.order[p.id].pos.get(v, -1) for v in m.U]
        # dependency list keys
        post = list(reversed(tree.preorder()))
        pre = tree.preorder()
        leaves = [p.id for p in pieces if p.is_leaf]
        self.key = [[0] * npieces for _ in range(4)]
        nl = len(leaves)
        for i, x in enumerate(leaves):
            self.key[INSTAR][x] = i
            self.key[R][x] = nl + 2 * npieces + i
        for i, x in enumerate(post):
            self.key[IN][x] = nl + i
        for i, x in enumerate(pre):
            self.key[EX][x] = nl + npieces + i
        self._queued: set[int] = set()
        self._heap: list[tuple[int, int, int]] = []
        self._pending: dict[tuple[int, int], list[tuple[int, Delta]]] = {}
        self._reported: list[int] = []
        self._avoid_flips: list[int] = []
        self.flag = [False] * g.m
        self.is_on = [False] * g.m
        if aug is not None:
            self._inv_p = {x: i for i, x in enumerate(aug.p)}
            self.switch_on_internal(sorted(aug.E0))
            self._reported = []

    # -- public API ----------------------------------------------------------

    def switch_on(self, e: int) -> list[int]:
        return self.switch_on_batch([e])

    def switch_on_batch(self, edges) -> list[int]:
        """Switch on original edges (ids of ``aug.source``); returns original
        edges whose endpoint reachability flipped to true."""
        if self.aug is None:
            return self.switch_on_internal(list(edges))
        p = self.aug.p
        inner = []
        for e in edges:
            if not 0 <= e < len(p):
                raise UnknownEdge(f"edge {e}")
            inner.append(p[e])
        flipped = self.switch_on_internal(inner)
        inv = self._inv_p
        return sorted(inv[x] for x in flipped if x in inv)

    def query_edge_reachable(self, e: int) -> bool:
        if self.aug is not None:
            if not 0 <= e < len(self.aug.p):
                raise UnknownEdge(f"edge {e}")
            e = self.aug.p[e]
        elif not 0 <= e < self.g.m:
            raise UnknownEdge(f"edge {e}")
        return self.flag[e]

    def query_avoid(self, e: int) -> bool:
        """For a tracked edge uw: does u reach w with on-edges other than this one?"""
        if self.aug is not None:
            e = self.aug.p[e]
        lf = self.leaf_of_piece[self.leaf_of_edge[e]]
        return lf.avoid[e]

    def take_avoid_flips(self) -> list[int]:
        out = self._avoid_flips
        self._avoid_flips = []
        if self.aug is not None:
            inv = self._inv_p
            return [inv[x] for x in out if x in inv]
        return out

    # -- engine ----------------------------------------------------------------

    def switch_on_internal(self, edges) -> list[int]:
        """Switch on edges of the decomposed graph; returns its edges whose flag flipped."""
        touched = set()
        for e in edges:
            if self.is_on[e]:
                raise AlreadyOn(f"edge {e} is already on")
            self.is_on[e] = True
            L = self.leaf_of_edge[e]
            self.leaf_of_piece[L].on.add(e)
            touched.add(L)
        for L in touched:
            self._push(INSTAR, L)
        self._run()
        out = self._reported
        self._reported = []
        return out

    def _push(self, kind: int, x: int) -> None:
        k = self.key[kind][x]
        if k in self._queued:
            return
        self._queued.add(k)
        heapq.heappush(self._heap, (k, kind, x))
        self.counters.queue_pushes += 1

    def _notify(self, kind: int, x: int, side: int, d: Delta) -> None:
        self._pending.setdefault((kind, x), []).append((side, d))
        self._push(kind, x)

    def _run(self) -> None:
        heap = self._heap
        while heap:
            k, kind, x = heapq.heappop(heap)
            self._queued.discard(k)
            self.counters.queue_pops += 1
            if kind == INSTAR:
                self._do_instar(x)
            elif kind == IN:
                self._do_in(x)
            elif kind == EX:
                self._do_ex(x)
            else:
                self._do_r(x)

    def _do_instar(self, x: int) -> None:
        lf = self.leaf_of_piece[x]
        k = len(lf.verts)
        succ = [0] * k
        for e, a, b in lf.edges:
            if e in lf.on:
                succ[a] |= 1 << b
        new = leaf_closure(succ)
        self.counters.leaf_recomputes += 1
        if new == lf.instar:
            return
        lf.instar = new
        self._push(IN, x)
        if self.maintain_ex:
            self._push(R, x)

    def _emit_in(self, x: int, d: Delta) -> None:
        if not d.new:
            return
        self.counters.matrix_flips += len(d.new)
        tree = self.tree
        par = tree.pieces[x].parent
        if par is None:
            return
        if par != tree.root:
            side = 0 if tree.pieces[par].children[0] == x else 1
            self._notify(IN, par, side, d)
        if self.maintain_ex:
            self._notify(EX, tree.sibling(x), 1, d)

    def _do_in(self, x: int) -> None:
        if x == self.tree.root:
            return
        M = self.In[x]
        if x in self.leaf_of_piece:
            lf = self.leaf_of_piece[x]
            bm = lf.bmap
            rows = lf.instar
            new = []
            for s, ls in enumerate(bm):
                r = rows[ls]
                have = M.row[s]
                for t, lt in enumerate(bm):
                    if s != t and r >> lt & 1 and not have >> t & 1:
                        new.append((s, t))
            d = M.apply_positions(new)
        else:
            batches = self._pending.pop((IN, x), [])
            mc = self.mc_in[x]
            flips = mc.update_ids(batches)
            d = M.apply_positions(self._restrict(flips, self.to_in[x]))
        self._emit_in(x, d)

    @staticmethod
    def _restrict(flips, to):
        out = []
        for a, b in flips:
            s = to[a]
            if s >= 0:
                t = to[b]
                if t >= 0:
                    out.append((s, t))
        return out

    def _do_ex(self, x: int) -> None:
        batches = self._pending.pop((EX, x), [])
        mc = self.mc_ex[x]
        flips = mc.update_ids(batches)
        d = self.Ex[x].apply_positions(self._restrict(flips, self.to_ex[x]))
        if not d.new:
            return
        self.counters.matrix_flips += len(d.new)
        p = self.tree.pieces[x]
        if p.is_leaf:
            self._push(R, x)
        else:
            for c in p.children:
                self._notify(EX, c, 0, d)

    def _do_r(self, x: int) -> None:
        lf = self.leaf_of_piece[x]
        k = len(lf.verts)
        bm = lf.bmap
        ex = [0] * k
        if self.tree.pieces[x].parent is not None:
            E = self.Ex[x]
            for s, ls in enumerate(bm):
                r = E.row[s]
                acc = 0
                while r:
                    low = r & -r
                    acc |= 1 << bm[low.bit_length() - 1]
                    r ^= low
                ex[ls] = acc
        lf.ex_local = ex
        succ = [lf.instar[i] | ex[i] for i in range(k)]
        rows = leaf_closure(succ)
        self.counters.leaf_recomputes += 1
        lf.rrows = rows
        flag = self.flag
        for e, a, b in lf.edges:
            if not flag[e] and rows[b] >> a & 1:
                flag[e] = True
                self._reported.append(e)
        if lf.tracked:
            self._update_avoid(lf, ex)

    def _update_avoid(self, lf: _Leaf, ex: list[int]) -> None:
        for e, a, b in lf.tracked:
            if lf.avoid[e]:
                continue
            succ = list(ex)
            for f, s, t in lf.edges:
                if f != e and f in lf.on:
                    succ[s] |= 1 << t
            if a == b or leaf_closure(succ)[a] >> b & 1:
                lf.avoid[e] = True
                self._avoid_flips.append(e)

    # -- inspection --------------------------------------------------------------

    def leaf_reach(self, x: int, u: int, v: int) -> bool:
        lf = self.leaf_of_piece[x]
        return bool(lf.rrows[lf.local[u]] >> lf.local[v] & 1)

    def stats(self) -> dict:
        c = self.counters
        c.closure_pushes = sum(m.pushes for m in self.mc_in.values()) + \
            sum(m.pushes for m in self.mc_ex.values())
        c.closure_flips = sum(m.flips for m in self.mc_in.values()) + \
            sum(m.flips for m in self.mc_ex.values())
        return dict(c.__dict__)

    def dependencies(self, kind: int, x: int) -> list[tuple[int, int]]:
        """Direct dependencies of a matrix in the dependency list."""
        tree = self.tree
        p = tree.pieces[x]
        if kind == INSTAR:
            return []
        if kind == IN:
            return [(INSTAR, x)] if p.is_leaf else [(IN, c) for c in p.children]
        if kind == EX:
            return [(EX, p.parent), (IN, tree.sibling(x))] if p.parent is not None else []
        return [(INSTAR, x), (EX, x)]

    def dependency_order_ok(self) -> bool:
        for kind in (IN, EX, R):
            for p in self.tree.pieces:
                if kind == R and not p.is_leaf:
                    continue
                if kind == IN and p.id == self.tree.root:
                    continue
                for dk, dx in self.dependencies(kind, p.id):
                    if dk == IN and dx == self.tree.root:
                        continue
                    if self.key[dk][dx] >= self.key[kind][p.id]:
                        return False
        return True

    def matrix_pairs(self, kind: int, x: int) -> set[tuple[int, int]]:
        if kind in (IN, EX):
            M = (self.In if kind == IN else self.Ex)[x]
            return set(M.pairs())
        lf = self.leaf_of_piece[x]
        rows = lf.instar if kind == INSTAR else lf.rrows
        vs = lf.verts
        return {(vs[i], vs[j]) for i in range(len(vs)) for j in _bits(rows[i]) if i != j}

    def recompute_from_dependencies(self, kind: int, x: int) -> set[tuple[int, int]]:
        """Rebuild a boundary matrix from its declared dependencies only."""
        from .oracle import oracle_closure
        tree = self.tree
        p = tree.pieces[x]
        bnd = set(self.order[x].elements)
        if kind == IN and p.is_leaf:
            return {(u, v) for u, v in self.matrix_pairs(INSTAR, x) if u in bnd and v in bnd}
        if kind == IN:
            deps = [self.matrix_pairs(IN, c) for c in p.children]
            verts = set(self.order[p.children[0]].elements) | set(self.order[p.children[1]].elements)
        elif kind == EX:
            deps = [self.matrix_pairs(EX, p.parent), self.matrix_pairs(IN, tree.sibling(x))]
            verts = set(self.order[p.parent].elements) | set(self.order[tree.sibling(x)].elements)
        else:
            raise ValueError("only In and Ex are rebuilt from dependencies")
        edges = [pr for d in deps for pr in d]
        clo = oracle_closure(sorted(verts), edges)
        return {(u, v) for (u, v), val in clo.items() if val and u in bnd and v in bnd}

    def matrix_violations(self, sample: int | None = None, rng=None) -> list[str]:
        """Compare In, Ex and R against BFS on the current on-subgraph."""
        from .oracle import adjacency, reach_set
        g = self.g
        tree = self.tree
        out = []
        pieces = [p for p in tree.pieces if p.id != tree.root]
        if sample is not None and rng is not None and len(pieces) > sample:
            pieces = rng.sample(pieces, sample)
        on_all = [e for e in range(g.m) if self.is_on[e]]
        adj_all = adjacency(g.n, [(g.tail[e], g.head[e]) for e in on_all])
        for p in pieces:
            es = set(p.edges)
            bnd = self.order[p.id].elements
            adj_in = adjacency(g.n, [(g.tail[e], g.head[e]) for e in on_all if e in es])
            want = set()
            for u in bnd:
                r = reach_set(g.n, adj_in, u)
                want |= {(u, v) for v in bnd if v != u and v in r}
            if want != self.matrix_pairs(IN, p.id):
                out.append(f"In({p.id}) differs from BFS")
            if self.maintain_ex:
                adj_ex = adjacency(g.n, [(g.tail[e], g.head[e]) for e in on_all if e not in es])
                want = set()
                for u in bnd:
                    r = reach_set(g.n, adj_ex, u)
                    want |= {(u, v) for v in bnd if v != u and v in r}
                if want != self.matrix_pairs(EX, p.id):
                    out.append(f"Ex({p.id}) differs from BFS")
        if self.maintain_ex:
            for x, lf in self.leaf_of_piece.items():
                if sample is not None and rng is not None and rng.random() > sample / max(1, len(tree.pieces)):
                    continue
                want = set()
                for u in lf.verts:
                    r = reach_set(g.n, adj_all, u)
                    want |= {(u, v) for v in lf.verts if v != u and v in r}
                if want != self.matrix_pairs(R, x):
                    out.append(f"R({x}) differs from BFS")
        return out
