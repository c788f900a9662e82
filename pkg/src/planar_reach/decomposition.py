"""Recursive decompositions by simple cycle separators.

Two layers live here:

* :func:`build_decomposition` splits a triangulated, loop-free, bounded-degree
  plane graph recursively with fundamental-cycle separators.  Pieces are edge
  sets; their holes may touch themselves or each other.
* :func:`build_simple_decomposition` runs the preprocessing pipeline, builds
  the tree above, then replaces every vertex by a directed cycle with two
  vertices per incident edge and re-routes every separator through those
  cycles.  The resulting tree over the blown-up graph has simple, pairwise
  vertex-disjoint holes and edge-disjoint siblings.
"""

from __future__ import annotations

import json
import logging
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Iterable

from . import augment
from .augment import AugmentedGraph
from .errors import PreconditionViolated, TooSmall
from .plane_graph import FaceStructure, PlaneMultigraph, faces

log = logging.getLogger(__name__)

LEAF_THRESHOLD = 12
HOLE_CAP = 4
MAX_SEPARATOR_TRIES = 40

# weight modes cycled through by level
WEIGHT_MODES = ("vertex", "boundary", "hole")


@dataclass
class SeparatorRecord:
    """Closed curve v_1 .. v_k through a piece.

    ``parts[i]`` joins ``vertices[i]`` to ``vertices[i+1]`` (cyclically) and is
    either ``("edge", e)`` or ``("hole", h, d_i, d_j)`` where ``h`` indexes the
    parent's holes and ``d_i`` / ``d_j`` are the ring darts opening the hole
    corners at the two ends (the corner lies clockwise after that dart).
    """
    vertices: list[int]
    parts: list[tuple]
    curve: list[tuple[int, int]] | None = None   # (a_i, b_i) in the expanded graph

    def hole_parts(self) -> list[tuple]:
        return [p for p in self.parts if p[0] == "hole"]


@dataclass
class Piece:
    id: int
    parent: int | None
    level: int
    edges: list[int]
    children: list[int] = field(default_factory=list)
    bnd_groups: list[list[int]] = field(default_factory=list)
    holes: list[list[int]] = field(default_factory=list)   # dart walks
    separator: SeparatorRecord | None = None
    oversized: bool = False

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def bnd(self) -> set[int]:
        return {x for grp in self.bnd_groups for x in grp}

    @property
    def bnd_size(self) -> int:
        return sum(len(g) for g in self.bnd_groups)


@dataclass
class DecompTree:
    graph: PlaneMultigraph
    pieces: list[Piece]
    root: int = 0
    leaf_threshold: int = LEAF_THRESHOLD
    hole_cap: int = HOLE_CAP
    simple: bool = False

    def leaves(self) -> list[Piece]:
        return [p for p in self.pieces if p.is_leaf]

    def preorder(self) -> list[int]:
        out = []
        stack = [self.root]
        while stack:
            x = stack.pop()
            out.append(x)
            stack.extend(reversed(self.pieces[x].children))
        return out

    def sibling(self, x: int) -> int | None:
        par = self.pieces[x].parent
        if par is None:
            return None
        a, b = self.pieces[par].children
        return b if a == x else a

    def ancestors(self, x: int) -> list[int]:
        """x and its ancestors, bottom-up."""
        out = []
        while x is not None:
            out.append(x)
            x = self.pieces[x].parent
        return out

    def vertex_set(self, x: int) -> set[int]:
        g = self.graph
        vs = set()
        for e in self.pieces[x].edges:
            vs.add(g.tail[e])
            vs.add(g.head[e])
        return vs

    def depth(self) -> int:
        return max(p.level for p in self.pieces) + 1

    def level_stats(self) -> list[dict]:
        rows: dict[int, dict] = {}
        for p in self.pieces:
            r = rows.setdefault(p.level, {"level": p.level, "pieces": 0, "max_bnd": 0,
                                          "sum_bnd_sq": 0, "sum_edges": 0})
            b = p.bnd_size
            r["pieces"] += 1
            r["max_bnd"] = max(r["max_bnd"], b)
            r["sum_bnd_sq"] += b * b
            r["sum_edges"] += len(p.edges)
        return [rows[k] for k in sorted(rows)]

    def sum_bnd_sq(self) -> int:
        return sum(p.bnd_size ** 2 for p in self.pieces)

    def decay_constant(self) -> float | None:
        """Fit log(max |bnd| at level i) = A - i log c over levels with nonzero boundary."""
        pts = [(r["level"], math.log(r["max_bnd"])) for r in self.level_stats() if r["max_bnd"] > 0]
        if len(pts) < 2:
            return None
        mx = sum(x for x, _ in pts) / len(pts)
        my = sum(y for _, y in pts) / len(pts)
        sxx = sum((x - mx) ** 2 for x, _ in pts)
        if sxx == 0:
            return None
        slope = sum((x - mx) * (y - my) for x, y in pts) / sxx
        return math.exp(-slope)

    def leaf_of_edge(self) -> list[int]:
        out = [-1] * self.graph.m
        for p in self.pieces:
            if p.is_leaf:
                for e in p.edges:
                    out[e] = p.id
        return out

    def to_json(self) -> dict:
        return {
            "simple": self.simple,
            "n": self.graph.n,
            "m": self.graph.m,
            "leaf_threshold": self.leaf_threshold,
            "hole_cap": self.hole_cap,
            "pieces": [{"id": p.id, "parent": p.parent, "level": p.level,
                        "children": p.children, "edges": len(p.edges),
                        "boundary": p.bnd_groups} for p in self.pieces],
            "levels": self.level_stats(),
            "decay_constant": self.decay_constant(),
        }

    def dump(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh)


# ---------------------------------------------------------------------------
# sub-embedding helpers


def restricted_rings(g: PlaneMultigraph, member: Callable[[int], bool],
                     verts: Iterable[int]) -> dict[int, list[int]]:
    return {x: [d for d in g.rings[x] if member(d >> 1)] for x in verts}


def _succ_of(rr: dict[int, list[int]]) -> dict[int, int]:
    succ = {}
    for ring in rr.values():
        k = len(ring)
        for i, d in enumerate(ring):
            succ[d] = ring[(i + 1) % k]
    return succ


def _walks(succ: dict[int, int]) -> list[list[int]]:
    seen = set()
    walks = []
    for d0 in succ:
        if d0 in seen:
            continue
        walk = []
        d = d0
        while d not in seen:
            seen.add(d)
            walk.append(d)
            d = succ[d ^ 1]
        walks.append(walk)
    return walks


def _is_face_of(gf: FaceStructure, walk: list[int]) -> bool:
    f = gf.face_of[walk[0]]
    if len(gf.walks[f]) != len(walk):
        return False
    return all(gf.face_of[d] == f for d in walk)


def _vertices_of(g: PlaneMultigraph, edges: Iterable[int]) -> set[int]:
    vs = set()
    for e in edges:
        vs.add(g.tail[e])
        vs.add(g.head[e])
    return vs


def piece_holes(g: PlaneMultigraph, gf: FaceStructure, edges: Iterable[int]) -> list[list[int]]:
    eset = set(edges)
    rr = restricted_rings(g, eset.__contains__, _vertices_of(g, eset))
    return [w for w in _walks(_succ_of(rr)) if not _is_face_of(gf, w)]


def _connected(g: PlaneMultigraph, edges: list[int]) -> bool:
    if not edges:
        return True
    parent = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in edges:
        a, b = find(g.tail[e]), find(g.head[e])
        if a != b:
            parent[a] = b
    roots = {find(x) for x in list(parent)}
    return len(roots) == 1


def _group_boundary(g: PlaneMultigraph, holes: list[list[int]], bnd: set[int]) -> list[list[int]]:
    groups = []
    for walk in holes:
        grp = []
        seen = set()
        for d in walk:
            x = g.org(d)
            if x in bnd and x not in seen:
                seen.add(x)
                grp.append(x)
        groups.append(grp)
    return groups


# ---------------------------------------------------------------------------
# separator on a piece with star-filled holes


class _HolePlus:
    """The piece with one star vertex per hole, joined to every hole corner."""

    def __init__(self, g: PlaneMultigraph, edges: list[int], holes: list[list[int]]):
        self.g = g
        self.edges = edges
        self.holes = holes
        verts = sorted(_vertices_of(g, edges))
        self.verts = verts
        self.loc = {x: i for i, x in enumerate(verts)}
        nv = len(verts)
        self.nv = nv
        le_of = {e: i for i, e in enumerate(edges)}
        self.le_of = le_of
        hedges = [(self.loc[g.tail[e]], self.loc[g.head[e]]) for e in edges]
        rings = []
        for x in verts:
            rings.append([2 * le_of[d >> 1] + (d & 1) for d in g.rings[x] if (d >> 1) in le_of])
        self.star_info: dict[int, tuple[int, int]] = {}    # local edge -> (hole, corner index)
        for hi, walk in enumerate(holes):
            z = nv + hi
            k = len(walk)
            zring = []
            for i in range(k):
                d = walk[i]
                x = self.loc[g.org(d)]
                before = walk[i - 1] ^ 1
                s = len(hedges)
                hedges.append((x, z))
                self.star_info[s] = (hi, i)
                lb = 2 * le_of[before >> 1] + (before & 1)
                ring = rings[x]
                ring.insert(ring.index(lb) + 1, 2 * s)
                zring.append(2 * s + 1)
            zring.reverse()
            rings.append(zring)
        self.hp = PlaneMultigraph(nv + len(holes), hedges, rings)
        self.hf = faces(self.hp)

    def is_star(self, x: int) -> bool:
        return x >= self.nv


def _bfs(hp: PlaneMultigraph, root: int):
    par_dart = [-1] * hp.n
    depth = [-1] * hp.n
    depth[root] = 0
    order = [root]
    dq = deque([root])
    while dq:
        v = dq.popleft()
        for d in hp.rings[v]:
            w = hp.dest(d)
            if depth[w] == -1:
                depth[w] = depth[v] + 1
                par_dart[w] = d ^ 1
                order.append(w)
                dq.append(w)
    return par_dart, depth, order


def _center(hp: PlaneMultigraph, start: int) -> int:
    _, dep, order = _bfs(hp, start)
    a = order[-1]
    par, dep, order = _bfs(hp, a)
    b = order[-1]
    path = [b]
    while path[-1] != a:
        path.append(hp.dest(par[path[-1]]))
    return path[len(path) // 2]


def _face_weights(hp: PlaneMultigraph, hf: FaceStructure, vw: list[float]) -> list[float]:
    deg = [len(r) for r in hp.rings]
    out = []
    for walk in hf.walks:
        s = 0.0
        for d in walk:
            x = hp.org(d)
            if vw[x]:
                s += vw[x] / deg[x]
        out.append(s)
    return out


@dataclass
class _Split:
    separator: SeparatorRecord
    child_edges: tuple[list[int], list[int]]
    child_holes: tuple[list[list[int]], list[list[int]]]
    child_bnd: tuple[set[int], set[int]]
    balance: float


def _split_piece(g: PlaneMultigraph, gf: FaceStructure, edges: list[int], bnd: set[int],
                 holes: list[list[int]], level: int, hole_cap: int,
                 mode: str | None = None) -> _Split | None:
    hpw = _HolePlus(g, edges, holes)
    hp, hf = hpw.hp, hpw.hf
    if any(len(w) != 3 for w in hf.walks):
        raise PreconditionViolated("piece with star-filled holes is not triangulated")
    nv = hpw.nv
    root = _center(hp, 0)
    par_dart, depth, _ = _bfs(hp, root)
    tree = {par_dart[v] >> 1 for v in range(hp.n) if par_dart[v] != -1}
    # dual spanning tree on the faces through non-tree edges
    nf = hf.count
    fpar_edge = [-1] * nf
    seen = [False] * nf
    seen[0] = True
    forder = [0]
    stack = [0]
    while stack:
        f = stack.pop()
        for d in hf.walks[f]:
            e = d >> 1
            if e in tree:
                continue
            h = hf.face_of[d ^ 1]
            if not seen[h]:
                seen[h] = True
                fpar_edge[h] = e
                forder.append(h)
                stack.append(h)
    if len(forder) != nf:
        raise PreconditionViolated("non-tree edges do not span the dual")
    child_face = {}
    for f in range(1, nf):
        child_face[fpar_edge[f]] = f
    # preorder intervals on the dual tree
    kids = [[] for _ in range(nf)]
    for f in range(1, nf):
        e = fpar_edge[f]
        a, b = hf.face_of[2 * e], hf.face_of[2 * e + 1]
        kids[a if b == f else b].append(f)
    tin = [0] * nf
    tout = [0] * nf
    t = 0
    st = [(0, 0)]
    while st:
        f, i = st.pop()
        if i == 0:
            tin[f] = t
            t += 1
        if i < len(kids[f]):
            st.append((f, i + 1))
            st.append((kids[f][i], 0))
        else:
            tout[f] = t

    if mode is None:
        mode = WEIGHT_MODES[level % 3]
    vw = [0.0] * hp.n
    if mode == "boundary" and bnd:
        for x in bnd:
            vw[hpw.loc[x]] = 1.0
    elif mode == "hole" and len(holes) >= 2:
        for hi in range(len(holes)):
            vw[nv + hi] = 1.0
    else:
        for i in range(nv):
            vw[i] = 1.0
    fw = _face_weights(hp, hf, vw)
    sub = list(fw)
    for f in reversed(forder):
        if f:
            e = fpar_edge[f]
            a, b = hf.face_of[2 * e], hf.face_of[2 * e + 1]
            sub[a if b == f else b] += sub[f]
    W = sub[0] or 1.0

    def cyc_len(e):
        x, y = hp.tail[e], hp.head[e]
        dx, dy = depth[x], depth[y]
        n = 1
        while dx > dy:
            x = hp.dest(par_dart[x]); dx -= 1; n += 1
        while dy > dx:
            y = hp.dest(par_dart[y]); dy -= 1; n += 1
        while x != y:
            x = hp.dest(par_dart[x]); y = hp.dest(par_dart[y]); n += 2
        return n

    cands = []
    for e, f in child_face.items():
        inside = sub[f]
        bal = max(inside, W - inside) / W
        cands.append((bal, e))
    good = [(cyc_len(e), bal, e) for bal, e in cands if bal <= 2 / 3 + 1e-9]
    good.sort()
    rest = sorted((bal, e) for bal, e in cands if bal > 2 / 3 + 1e-9)
    order = [e for _, _, e in good] + [e for _, e in rest]
    bal_of = {e: bal for bal, e in cands}
    tries = 0
    for e in order:
        if tries >= MAX_SEPARATOR_TRIES:
            break
        tries += 1
        res = _try_cycle(g, gf, hpw, par_dart, depth, e, child_face[e], tin, tout, bnd, hole_cap)
        if res is not None:
            res.balance = bal_of[e]
            return res
    return None


def _try_cycle(g, gf, hpw: _HolePlus, par_dart, depth, e, cf, tin, tout, bnd, hole_cap):
    hp, hf = hpw.hp, hpw.hf
    nv = hpw.nv
    x, y = hp.tail[e], hp.head[e]
    # path x .. lca .. y, then e closes it
    up_x = [(x, None)]
    up_y = [(y, None)]
    while depth[up_x[-1][0]] > depth[up_y[-1][0]]:
        v = up_x[-1][0]
        up_x.append((hp.dest(par_dart[v]), par_dart[v] >> 1))
    while depth[up_y[-1][0]] > depth[up_x[-1][0]]:
        v = up_y[-1][0]
        up_y.append((hp.dest(par_dart[v]), par_dart[v] >> 1))
    while up_x[-1][0] != up_y[-1][0]:
        v = up_x[-1][0]
        up_x.append((hp.dest(par_dart[v]), par_dart[v] >> 1))
        v = up_y[-1][0]
        up_y.append((hp.dest(par_dart[v]), par_dart[v] >> 1))
    # cyc[i] = (vertex, local edge to the next vertex)
    cyc = [(up_x[i][0], up_x[i + 1][1]) for i in range(len(up_x) - 1)]
    down = up_y[::-1]
    cyc += [(down[i][0], down[i][1]) for i in range(len(down) - 1)]
    cyc.append((y, e))
    L = len(cyc)
    if L < 3:
        return None
    verts_only = [v for v, _ in cyc]
    if len(set(verts_only)) != L:
        return None
    start = next(i for i, (v, _) in enumerate(cyc) if v < nv)
    cyc = cyc[start:] + cyc[:start]
    vs: list[int] = []
    parts: list[tuple] = []
    on_cycle_h: set[int] = set()          # local H edges lying on the curve
    i = 0
    holes = hpw.holes
    while i < L:
        v, le = cyc[i]
        nxt = cyc[(i + 1) % L][0]
        vs.append(hpw.verts[v])
        if nxt >= nv:
            le2 = cyc[(i + 1) % L][1]
            hi, ci = hpw.star_info[le]
            hj, cj = hpw.star_info[le2]
            walk = holes[hi]
            k = len(walk)
            if (cj - ci) % k == 1:
                he = walk[ci] >> 1
                parts.append(("edge", he))
                on_cycle_h.add(hpw.le_of[he])
            elif (ci - cj) % k == 1:
                he = walk[cj] >> 1
                parts.append(("edge", he))
                on_cycle_h.add(hpw.le_of[he])
            else:
                parts.append(("hole", hi, walk[ci - 1] ^ 1, walk[cj - 1] ^ 1))
            i += 2
        else:
            parts.append(("edge", hpw.edges[le]))
            on_cycle_h.add(le)
            i += 1
    k = len(vs)
    if k < 2 or len(set(vs)) != k:
        return None
    ep = [p[1] for p in parts if p[0] == "edge"]
    if len(set(ep)) != len(ep):
        return None
    # sides of the H edges
    lo, hi_ = tin[cf], tout[cf]
    side_in: list[int] = []
    side_out: list[int] = []
    n_in = n_out = 0
    for le_, ge in enumerate(hpw.edges):
        if le_ in on_cycle_h:
            side_in.append(ge)
            side_out.append(ge)
            continue
        f = hf.face_of[2 * le_]
        if lo <= tin[f] < hi_:
            side_in.append(ge)
            n_in += 1
        else:
            side_out.append(ge)
            n_out += 1
    if n_in == 0 or n_out == 0:
        return None
    if not (_connected(g, side_in) and _connected(g, side_out)):
        return None
    h_in = piece_holes(g, gf, side_in)
    h_out = piece_holes(g, gf, side_out)
    if len(h_in) > hole_cap or len(h_out) > hole_cap:
        return None
    cset = set(vs) | bnd
    b_in = _vertices_of(g, side_in) & cset
    b_out = _vertices_of(g, side_out) & cset
    for bb, hh in ((b_in, h_in), (b_out, h_out)):
        on = {g.org(d) for w in hh for d in w}
        if not bb <= on:
            return None
    sep = SeparatorRecord(vs, parts)
    return _Split(sep, (side_in, side_out), (h_in, h_out), (b_in, b_out), 0.0)


def simple_cycle_separator(g: PlaneMultigraph, edges: list[int], bnd: set[int] | None = None,
                           holes: list[list[int]] | None = None, *, level: int = 0,
                           leaf_threshold: int = LEAF_THRESHOLD, hole_cap: int = HOLE_CAP,
                           mode: str | None = "vertex") -> _Split:
    """Separator of the piece given by ``edges`` (holes computed when not supplied)."""
    if len(edges) <= leaf_threshold:
        raise TooSmall(f"piece has {len(edges)} edges, threshold {leaf_threshold}")
    gf = faces(g)
    if holes is None:
        holes = piece_holes(g, gf, edges)
    res = _split_piece(g, gf, list(edges), set(bnd or ()), holes, level, hole_cap, mode)
    if res is None:
        raise PreconditionViolated("no admissible separator found")
    return res


def _check_triangulated(g: PlaneMultigraph, gf: FaceStructure) -> None:
    if not g.is_connected():
        raise PreconditionViolated("graph is not connected")
    for e in range(g.m):
        if g.tail[e] == g.head[e]:
            raise PreconditionViolated(f"edge {e} is a loop")
    for w in gf.walks:
        if len(w) != 3:
            raise PreconditionViolated(f"face of size {len(w)}: graph is not triangulated")


def build_decomposition(g: PlaneMultigraph, *, leaf_threshold: int = LEAF_THRESHOLD,
                        hole_cap: int = HOLE_CAP) -> DecompTree:
    """Recursive decomposition of a triangulated, loop-free, connected plane graph."""
    gf = faces(g)
    _check_triangulated(g, gf)
    root = Piece(0, None, 0, list(range(g.m)))
    pieces = [root]
    bnds: list[set[int]] = [set()]
    stack = [0]
    while stack:
        x = stack.pop()
        pc = pieces[x]
        if len(pc.edges) <= leaf_threshold:
            continue
        res = _split_piece(g, gf, pc.edges, bnds[x], pc.holes, pc.level, hole_cap)
        if res is None:
            pc.oversized = True
            log.info("piece %d with %d edges kept as an oversized leaf", x, len(pc.edges))
            continue
        pc.separator = res.separator
        for side in (0, 1):
            cid = len(pieces)
            child = Piece(cid, x, pc.level + 1, res.child_edges[side])
            child.holes = res.child_holes[side]
            pieces.append(child)
            bnds.append(res.child_bnd[side])
            pc.children.append(cid)
            stack.append(cid)
    for pc, bb in zip(pieces, bnds):
        pc.bnd_groups = _group_boundary(g, pc.holes, bb)
    return DecompTree(g, pieces, 0, leaf_threshold, hole_cap, simple=False)


# ---------------------------------------------------------------------------
# expansion into a simple decomposition


class _Expander:
    """Mutable expanded graph built on top of a decomposition of ``g``."""

    def __init__(self, g: PlaneMultigraph, tree: DecompTree, check: bool = False):
        self.g = g
        self.tree = tree
        self.check = check
        self.tail: list[int] = []
        self.head: list[int] = []
        self.rings: list[list[int]] = []
        self.orig: list[int] = []
        self.vertex_edge: list[bool] = []
        self.owner: list[int] = []
        self.src: list[int] = []            # G' edge of a rung, -1 for cycle edges
        self.rungs_of: list[list[int]] = [[] for _ in range(g.m)]
        self.piece_edges: dict[int, list[int]] = {}
        self.created_bnd: dict[int, set[int]] = {0: set()}
        self.reports: list[str] = []
        self.curves: dict[int, list[tuple[int, int]]] = {}
        self._piece_sets = [set(p.edges) for p in tree.pieces]
        self._root()

    # -- primitives ---------------------------------------------------------
    def _nv(self, v: int) -> int:
        self.rings.append([])
        self.orig.append(v)
        return len(self.orig) - 1

    def _ne(self, t: int, h: int, vertex_edge: bool, owner: int, src: int = -1) -> int:
        e = len(self.tail)
        self.tail.append(t)
        self.head.append(h)
        self.vertex_edge.append(vertex_edge)
        self.owner.append(owner)
        self.src.append(src)
        if src >= 0:
            self.rungs_of[src].append(e)
        self.piece_edges.setdefault(owner, []).append(e)
        return e

    def _root(self) -> None:
        g = self.g
        frag: dict[int, tuple[int, int]] = {}
        rung_dart: dict[int, int] = {}
        cyc_out: dict[int, int] = {}
        cyc_in: dict[int, int] = {}
        for v in range(g.n):
            qs = []
            for d in g.rings[v]:
                x1, x2 = self._nv(v), self._nv(v)
                frag[d] = (x1, x2)
                qs += [x1, x2]
            if len(g.rings[v]) == 1:
                qs.append(self._nv(v))
            k = len(qs)
            for j in range(k):
                e = self._ne(qs[j], qs[(j + 1) % k], True, 0)
                cyc_out[qs[j]] = e
                cyc_in[qs[(j + 1) % k]] = e
        self.p = []
        for e in range(g.m):
            t1, t2 = frag[2 * e]
            h1, h2 = frag[2 * e + 1]
            r1 = self._ne(t1, h2, False, 0, e)
            r2 = self._ne(t2, h1, False, 0, e)
            rung_dart[t1] = 2 * r1
            rung_dart[h2] = 2 * r1 + 1
            rung_dart[t2] = 2 * r2
            rung_dart[h1] = 2 * r2 + 1
            self.p.append(r1)
        for x in range(len(self.orig)):
            ring = []
            if x in rung_dart:
                ring.append(rung_dart[x])
            ring.append(2 * cyc_out[x])
            ring.append(2 * cyc_in[x] + 1)
            self.rings[x] = ring

    # -- queries on the current leaf E(H) ----------------------------------
    def _out(self, H: int, x: int) -> int:
        found = -1
        for d in self.rings[x]:
            e = d >> 1
            if not (d & 1) and self.vertex_edge[e] and self.owner[e] == H:
                if found != -1:
                    raise PreconditionViolated(f"vertex {x} has two outgoing cycle edges in piece {H}")
                found = d
        if found == -1:
            raise PreconditionViolated(f"vertex {x} has no outgoing cycle edge in piece {H}")
        return found

    def _in(self, H: int, x: int) -> int:
        for d in self.rings[x]:
            e = d >> 1
            if (d & 1) and self.vertex_edge[e] and self.owner[e] == H:
                return d
        raise PreconditionViolated(f"vertex {x} has no incoming cycle edge in piece {H}")

    def _rung_at(self, H: int, x: int) -> int:
        for d in self.rings[x]:
            e = d >> 1
            if not self.vertex_edge[e] and self.owner[e] == H:
                return d
        return -1

    def _fragment(self, H: int, e: int, v: int) -> tuple[int, int]:
        ends = []
        for r in self.rungs_of[e]:
            if self.owner[r] != H:
                continue
            ends.append(self.tail[r] if self.orig[self.tail[r]] == v else self.head[r])
        if len(ends) != 2:
            raise PreconditionViolated(f"edge {e} has {len(ends)} rungs in piece {H}")
        x1, x2 = ends
        if self.head[self._out(H, x1) >> 1] == x2:
            return x1, x2
        if self.head[self._out(H, x2) >> 1] == x1:
            return x2, x1
        raise PreconditionViolated(f"fragment of edge {e} at {v} is not contiguous")

    # -- one split ------------------------------------------------------------
    def split(self, H: int) -> None:
        g = self.g
        pc = self.tree.pieces[H]
        sep = pc.separator
        vs, parts = sep.vertices, sep.parts
        k = len(vs)
        hset = self._piece_sets[H]
        edge_part_edges = {p[1] for p in parts if p[0] == "edge"}
        a = [-1] * k
        b = [-1] * k
        cut: set[int] = set()

        def hole_end(v: int, d1: int) -> tuple[int, int]:
            ring = [d for d in g.rings[v] if (d >> 1) in hset]
            d2 = ring[(ring.index(d1) + 1) % len(ring)]
            e1, e2 = d1 >> 1, d2 >> 1
            if e1 == e2:
                _, last = self._fragment(H, e1, v)
                od = self._out(H, last)
                x = self.head[od >> 1]
                if self._rung_at(H, x) != -1:
                    raise PreconditionViolated(f"no spare cycle vertex at {v} in piece {H}")
                return x, self._out(H, x)
            if e1 in edge_part_edges:
                first, _ = self._fragment(H, e2, v)
                return first, self._rung_at(H, first)
            _, last = self._fragment(H, e1, v)
            return last, self._out(H, last)

        for i, part in enumerate(parts):
            if part[0] == "hole":
                _, _, di, dj = part
                b[i], cb = hole_end(vs[i], di)
                j = (i + 1) % k
                a[j], ca = hole_end(vs[j], dj)
                cut.add(cb)
                cut.add(ca)
        for i, part in enumerate(parts):
            if part[0] != "edge":
                continue
            e = part[1]
            j = (i + 1) % k
            x = self._subdivide(H, e, vs[i])
            y = self._subdivide(H, e, vs[j])
            b[i], a[j] = x, y
            if g.tail[e] == vs[i]:
                r1 = self._ne(x, y, False, H, e)
                r2 = self._ne(x, y, False, H, e)
                dx1, dx2, dy1, dy2 = 2 * r1, 2 * r2, 2 * r1 + 1, 2 * r2 + 1
            else:
                r1 = self._ne(y, x, False, H, e)
                r2 = self._ne(y, x, False, H, e)
                dx1, dx2, dy1, dy2 = 2 * r1 + 1, 2 * r2 + 1, 2 * r1, 2 * r2
            self.rings[x][0:0] = [dx1, dx2]
            self.rings[y][0:0] = [dy2, dy1]
            cut.add(dx2)
            cut.add(dy1)
        for i in range(k):
            ai, bi = a[i], b[i]
            if ai == bi:
                raise PreconditionViolated(f"curve enters and leaves vertex {vs[i]} at the same copy")
            ca = self._chord_slot(H, ai)
            cb = self._chord_slot(H, bi)
            eab = self._ne(ai, bi, True, H)
            eba = self._ne(bi, ai, True, H)
            ra = self.rings[ai]
            ra[ca:ca] = [2 * eba + 1, 2 * eab]
            rb = self.rings[bi]
            rb[cb:cb] = [2 * eab + 1, 2 * eba]
            cut.add(2 * eab)
            cut.add(2 * eba)
        self.curves[H] = list(zip(a, b))
        self._assign(H, cut, a, b)

    def _chord_slot(self, H: int, x: int) -> int:
        od = self._out(H, x)
        idn = self._in(H, x)
        ring = self.rings[x]
        i = ring.index(od)
        if ring[(i + 1) % len(ring)] != idn:
            raise PreconditionViolated(f"cycle face at vertex {x} is not empty in piece {H}")
        return i + 1

    def _subdivide(self, H: int, e: int, v: int) -> int:
        x1, x2 = self._fragment(H, e, v)
        q = self._out(H, x1) >> 1
        z = self._nv(v)
        self.head[q] = z
        q2 = self._ne(z, x2, True, H)
        r2 = self.rings[x2]
        r2[r2.index(2 * q + 1)] = 2 * q2 + 1
        self.rings[z] = [2 * q2, 2 * q + 1]
        return z

    def _assign(self, H: int, cut: set[int], a: list[int], b: list[int]) -> None:
        owner = self.owner
        el = self.piece_edges[H]
        # edges meeting at a corner not crossed by the curve share a side
        link: dict[int, list[int]] = {e: [] for e in el}
        verts = set()
        for e in el:
            verts.add(self.tail[e])
            verts.add(self.head[e])
        rings = self.rings
        for x in verts:
            rr = [d for d in rings[x] if owner[d >> 1] == H]
            prev = rr[-1]
            for s in rr:
                if s not in cut:
                    e1, e2 = prev >> 1, s >> 1
                    if e1 != e2:
                        link[e1].append(e2)
                        link[e2].append(e1)
                prev = s
        root_of: dict[int, int] = {}
        classes: dict[int, list[int]] = {}
        for e in el:
            if e not in root_of:
                root_of[e] = e
                stack = [e]
                while stack:
                    for f in link[stack.pop()]:
                        if f not in root_of:
                            root_of[f] = e
                            stack.append(f)
            classes.setdefault(root_of[e], []).append(e)
        if len(classes) != 2:
            raise PreconditionViolated(f"curve splits piece {H} into {len(classes)} parts")
        c1, c2 = self.tree.pieces[H].children
        s1, s2 = self._piece_sets[c1], self._piece_sets[c2]
        votes: dict[int, set[int]] = {}
        for root, members in classes.items():
            for e in members:
                src = self.src[e]
                if src < 0:
                    continue
                in1, in2 = src in s1, src in s2
                if in1 != in2:
                    votes.setdefault(root, set()).add(c1 if in1 else c2)
        mapping = {}
        for root in classes:
            vv = votes.get(root, set())
            if len(vv) != 1:
                raise PreconditionViolated(f"cannot match a side of piece {H} to a child")
            mapping[root] = vv.pop()
        if set(mapping.values()) != {c1, c2}:
            raise PreconditionViolated(f"both sides of piece {H} match the same child")
        for root, members in classes.items():
            c = mapping[root]
            for e in members:
                owner[e] = c
            self.piece_edges[c] = members
        del self.piece_edges[H]
        cv = set(a) | set(b)
        hb = self.created_bnd[H]
        for c in (c1, c2):
            vc = set()
            for e in self.piece_edges[c]:
                vc.add(self.tail[e])
                vc.add(self.head[e])
            self.created_bnd[c] = (cv & vc) | (hb & vc)
            if self.check:
                self._check_new_leaf(c)

    # -- creation-time property checks --------------------------------------
    def _check_new_leaf(self, c: int) -> None:
        g = self.g
        el = self.piece_edges[c]
        gpc = self.tree.pieces[c]
        gset = self._piece_sets[c]
        gbnd = gpc.bnd
        # cycles of each original vertex
        outs: dict[int, list[int]] = {}
        ins: dict[int, int] = {}
        for e in el:
            if self.vertex_edge[e]:
                outs.setdefault(self.tail[e], []).append(e)
                ins[self.head[e]] = ins.get(self.head[e], 0) + 1
        cyc_verts: dict[int, list[int]] = {}
        for x, lst in outs.items():
            if len(lst) != 1 or ins.get(x) != 1:
                self.reports.append(f"B.5 piece {c}: vertex {x} is not on a single cycle")
                return
            cyc_verts.setdefault(self.orig[x], []).append(x)
        for v, xs in cyc_verts.items():
            # one cycle per original vertex
            start = xs[0]
            n = 0
            x = start
            while True:
                x = self.head[outs[x][0]]
                n += 1
                if x == start or n > len(xs):
                    break
            if n != len(xs):
                self.reports.append(f"B.5 piece {c}: copies of vertex {v} form several cycles")
        frag_verts = set()
        deg_c: dict[int, int] = {}
        for e in gset:
            rs = [r for r in self.rungs_of[e] if self.owner[r] == c]
            if len(rs) != 2:
                self.reports.append(f"B.5 piece {c}: edge {e} has {len(rs)} rungs")
                continue
            for v in (g.tail[e], g.head[e]):
                deg_c[v] = deg_c.get(v, 0) + 1
            for r in rs:
                frag_verts.add(self.tail[r])
                frag_verts.add(self.head[r])
        for v, xs in cyc_verts.items():
            extra = sum(1 for x in xs if x not in frag_verts)
            if extra > len(g.rings[v]) - deg_c.get(v, 0) + 1:
                self.reports.append(f"B.3 piece {c}: {extra} spare copies of vertex {v}")
        for x in self.created_bnd[c]:
            if self.orig[x] not in gbnd:
                self.reports.append(f"B.1 piece {c}: boundary copy {x} of interior vertex {self.orig[x]}")
        # holes of E(c) in the current expanded graph
        vc = set(outs)
        rr = {x: [d for d in self.rings[x] if self.owner[d >> 1] == c] for x in vc}
        succ_c = _succ_of(rr)
        nholes = 0
        for w in _walks(succ_c):
            for d in w:
                ring = self.rings[self.head[d >> 1] if not (d & 1) else self.tail[d >> 1]]
                tw = d ^ 1
                i = ring.index(tw)
                if ring[(i + 1) % len(ring)] != succ_c[tw]:
                    nholes += 1
                    break
        if nholes != len(gpc.holes):
            self.reports.append(f"B.4 piece {c}: {nholes} holes, underlying piece has {len(gpc.holes)}")

    # -- output ---------------------------------------------------------------
    def run(self) -> None:
        tree = self.tree
        for x in tree.preorder():
            if tree.pieces[x].children:
                self.split(x)

    def graph(self) -> PlaneMultigraph:
        edges = list(zip(self.tail, self.head))
        return PlaneMultigraph(len(self.orig), edges, self.rings)


def _simple_tree(ex: _Expander, g2: PlaneMultigraph) -> DecompTree:
    base = ex.tree
    gf2 = faces(g2)
    npieces = len(base.pieces)
    pieces = [Piece(p.id, p.parent, p.level, [], list(p.children), oversized=p.oversized)
              for p in base.pieces]
    order = base.preorder()
    pre = [0] * npieces
    end = [0] * npieces
    for i, x in enumerate(order):
        pre[x] = i
    for x in reversed(order):
        pc = base.pieces[x]
        end[x] = max([pre[x] + 1] + [end[c] for c in pc.children])
    for x in reversed(order):
        if pieces[x].children:
            c1, c2 = pieces[x].children
            pieces[x].edges = pieces[c1].edges + pieces[c2].edges
        else:
            pieces[x].edges = list(ex.piece_edges.get(x, []))
    owner = ex.owner
    tail, head = g2.tail, g2.head
    vsets: list[set[int]] = [set() for _ in range(npieces)]
    for x in reversed(order):
        if pieces[x].children:
            c1, c2 = pieces[x].children
            vsets[x] = vsets[c1] | vsets[c2]
        else:
            vs = set()
            for e in pieces[x].edges:
                vs.add(tail[e])
                vs.add(head[e])
            vsets[x] = vs
    bnds: list[set[int]] = [set() for _ in range(npieces)]
    for x in order:
        par = pieces[x].parent
        if par is None:
            continue
        c1, c2 = pieces[par].children
        sib = c2 if c1 == x else c1
        bnds[x] = vsets[x] & (vsets[sib] | bnds[par])
    for x in order:
        lo, hi = pre[x], end[x]

        def member(e, lo=lo, hi=hi):
            return lo <= pre[owner[e]] < hi

        holes = []
        seen = set()
        for v in bnds[x]:
            for d0 in g2.rings[v]:
                if not member(d0 >> 1) or d0 in seen:
                    continue
                walk = []
                d = d0
                while True:
                    seen.add(d)
                    walk.append(d)
                    # restricted successor of the twin
                    t = d ^ 1
                    nd = g2.succ[t]
                    while not member(nd >> 1):
                        nd = g2.succ[nd]
                    d = nd
                    if d == d0:
                        break
                if not _is_face_of(gf2, walk):
                    holes.append(walk)
        pieces[x].holes = holes
        pieces[x].bnd_groups = _group_boundary(g2, holes, bnds[x])
        sep = base.pieces[x].separator
        if sep is not None:
            pieces[x].separator = SeparatorRecord(sep.vertices, sep.parts, ex.curves.get(x))
    tree = DecompTree(g2, pieces, 0, base.leaf_threshold, base.hole_cap, simple=True)
    tree.vertex_sets = vsets          # type: ignore[attr-defined]
    tree.boundary_sets = bnds         # type: ignore[attr-defined]
    tree.created_boundary = ex.created_bnd   # type: ignore[attr-defined]
    tree.construction_report = ex.reports    # type: ignore[attr-defined]
    tree.base = base                  # type: ignore[attr-defined]
    tree.subtree_range = (pre, end)   # type: ignore[attr-defined]
    return tree


def expand_decomposition(g: PlaneMultigraph, tree: DecompTree, *,
                         check: bool = False) -> tuple[AugmentedGraph, DecompTree]:
    """Blow up every vertex of ``g`` into a cycle and emit the simple decomposition."""
    ex = _Expander(g, tree, check)
    ex.run()
    g2 = ex.graph()
    S = [[] for _ in range(g.n)]
    for x, v in enumerate(ex.orig):
        S[v].append(x)
    E0 = frozenset(e for e in range(g2.m) if ex.vertex_edge[e])
    D = max(len(r) for r in g2.rings)
    step = AugmentedGraph(g2, g, list(ex.p), E0, list(ex.orig), S, D, ["expand_decomposition"])
    step.rung_source = list(ex.src)     # type: ignore[attr-defined]
    return step, _simple_tree(ex, g2)


def build_simple_decomposition(g_orig: PlaneMultigraph, *, leaf_threshold: int = LEAF_THRESHOLD,
                               hole_cap: int = HOLE_CAP,
                               check: bool = False) -> tuple[AugmentedGraph, DecompTree]:
    """Full pipeline: preprocess, decompose, expand.  Returns composed mappings and the tree."""
    pre = augment.preprocess(g_orig)
    base = build_decomposition(pre.graph, leaf_threshold=leaf_threshold, hole_cap=hole_cap)
    step, tree = expand_decomposition(pre.graph, base, check=check)
    return augment.compose(pre, step), tree


# ---------------------------------------------------------------------------
# validators (violations are returned, never raised)


def validate_simple(t: DecompTree) -> list[str]:
    g = t.graph
    gf = faces(g)
    out: list[str] = []
    count = [0] * g.m
    vsets = [t.vertex_set(p.id) for p in t.pieces]
    for p in t.pieces:
        if p.is_leaf:
            for e in p.edges:
                count[e] += 1
            continue
        c1, c2 = (t.pieces[c] for c in p.children)
        s1, s2 = set(c1.edges), set(c2.edges)
        if s1 & s2:
            out.append(f"piece {p.id}: children share {len(s1 & s2)} edges")
        if (s1 | s2) != set(p.edges):
            out.append(f"piece {p.id}: children do not cover the piece")
    for e, c in enumerate(count):
        if c != 1:
            out.append(f"edge {e} lies in {c} leaves")
            if len(out) > 50:
                break
    for p in t.pieces:
        seen: dict[int, int] = {}
        if len(p.holes) > t.hole_cap:
            out.append(f"piece {p.id}: {len(p.holes)} holes exceed cap {t.hole_cap}")
        for hi, walk in enumerate(p.holes):
            vs = [g.org(d) for d in walk]
            if len(set(vs)) != len(vs):
                out.append(f"piece {p.id}: hole {hi} is not simple")
            if _is_face_of(gf, walk):
                out.append(f"piece {p.id}: hole {hi} is a face of the graph")
            for v in set(vs):
                if v in seen:
                    out.append(f"piece {p.id}: holes {seen[v]} and {hi} share vertex {v}")
                seen[v] = hi
        for v in p.bnd:
            if v not in seen:
                out.append(f"piece {p.id}: boundary vertex {v} lies on no hole")
        if p.parent is None:
            if p.bnd:
                out.append("root has nonempty boundary")
            continue
        sib = t.sibling(p.id)
        expect = vsets[p.id] & (vsets[sib] | t.pieces[p.parent].bnd)
        if expect != p.bnd:
            out.append(f"piece {p.id}: boundary differs from the recurrence")
    return out


def check_boundary_lemma(t: DecompTree) -> list[str]:
    """V(H) & V(G - H) must lie inside the boundary of H."""
    g = t.graph
    out = []
    inc: list[list[int]] = [[] for _ in range(g.n)]
    for e in range(g.m):
        inc[g.tail[e]].append(e)
        inc[g.head[e]].append(e)
    for p in t.pieces:
        es = set(p.edges)
        bnd = p.bnd
        for v in t.vertex_set(p.id):
            if v not in bnd and any(e not in es for e in inc[v]):
                out.append(f"piece {p.id}: vertex {v} touches outside edges but is not boundary")
                break
    return out


def check_separator_curves(t: DecompTree) -> list[str]:
    """Each hole of H must leave every component of G - H on one side.

    Checked combinatorially: every complement edge meeting H sits in a hole
    corner, and each connected component of G - H meets a single hole.
    """
    g = t.graph
    out = []
    for p in t.pieces:
        if p.parent is None:
            continue
        es = set(p.edges)
        rest = [e for e in range(g.m) if e not in es]
        parent = {}

        def find(x):
            parent.setdefault(x, x)
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e in rest:
            a, b = find(g.tail[e]), find(g.head[e])
            if a != b:
                parent[a] = b
        # darts of G - H sitting in each hole corner
        comp_holes: dict[int, set[int]] = {}
        for hi, walk in enumerate(p.holes):
            for i, d in enumerate(walk):
                x = g.org(d)
                # the hole corner at x runs clockwise from the twin of the previous dart to d
                r = g.rings[x]
                j = (r.index(walk[i - 1] ^ 1) + 1) % len(r)
                while r[j] != d:
                    if (r[j] >> 1) not in es:
                        comp_holes.setdefault(find(x), set()).add(hi)
                    j = (j + 1) % len(r)
        for c, hs in comp_holes.items():
            if len(hs) > 1:
                out.append(f"piece {p.id}: a component of the complement touches holes {sorted(hs)}")
    return out


def border_size_report(t: DecompTree, D: int) -> list[str]:
    """|bnd E(H)| <= (2D+1) |bnd H| for every piece of an expanded tree."""
    base = getattr(t, "base", None)
    if base is None:
        return []
    out = []
    for p, q in zip(t.pieces, base.pieces):
        if p.bnd_size > (2 * D + 1) * q.bnd_size:
            out.append(f"piece {p.id}: {p.bnd_size} > (2D+1) * {q.bnd_size}")
    return out
