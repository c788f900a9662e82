"""Embedded directed planar multigraphs stored as rotation systems.

Every edge ``e`` owns two darts: ``2*e`` sits at the tail (token ``e<k>+``)
and ``2*e + 1`` sits at the head (token ``e<k>-``).  Each vertex keeps the
clockwise cyclic sequence of its darts.  The face permutation maps a dart
``d`` to the rotation successor of its twin, so every orbit traces the face
lying to the left of its darts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import DisconnectedInput, MalformedRing, NonPlanarRotation, ParseError


def twin(d: int) -> int:
    return d ^ 1


def dart_token(d: int) -> str:
    return f"e{d >> 1}{'-' if d & 1 else '+'}"


def parse_dart_token(tok: str) -> int:
    if len(tok) < 3 or tok[0] != "e" or tok[-1] not in "+-":
        raise ValueError(f"bad dart token {tok!r}")
    e = int(tok[1:-1])
    if e < 0:
        raise ValueError(f"bad dart token {tok!r}")
    return 2 * e + (1 if tok[-1] == "-" else 0)


class PlaneMultigraph:
    """A directed multigraph together with a clockwise rotation system."""

    __slots__ = ("n", "tail", "head", "rings", "succ", "pred", "outer_dart")

    def __init__(self, n: int, edges: Sequence[tuple[int, int]],
                 rings: Sequence[Sequence[int]], *, validate: bool = True,
                 outer_dart: int | None = None):
        self.n = n
        self.tail = [int(t) for t, _ in edges]
        self.head = [int(h) for _, h in edges]
        self.rings = [list(r) for r in rings]
        m = len(self.tail)
        self.succ = [-1] * (2 * m)
        self.pred = [-1] * (2 * m)
        if validate:
            self._check_rings()
        for ring in self.rings:
            k = len(ring)
            for i, d in enumerate(ring):
                nxt = ring[(i + 1) % k]
                self.succ[d] = nxt
                self.pred[nxt] = d
        # the unbounded face is the face containing this dart
        self.outer_dart = outer_dart if outer_dart is not None else (1 if m else None)
        if validate:
            check_euler(self)

    # -- basic accessors -------------------------------------------------
    @property
    def m(self) -> int:
        return len(self.tail)

    def org(self, d: int) -> int:
        e = d >> 1
        return self.head[e] if d & 1 else self.tail[e]

    def dest(self, d: int) -> int:
        e = d >> 1
        return self.tail[e] if d & 1 else self.head[e]

    def face_next(self, d: int) -> int:
        return self.succ[d ^ 1]

    def edges(self) -> list[tuple[int, int]]:
        return list(zip(self.tail, self.head))

    def degree(self, v: int) -> int:
        return len(self.rings[v])

    def _check_rings(self) -> None:
        m = len(self.tail)
        if len(self.rings) != self.n:
            raise MalformedRing(f"expected {self.n} rings, got {len(self.rings)}")
        for e in range(m):
            for v in (self.tail[e], self.head[e]):
                if not 0 <= v < self.n:
                    raise MalformedRing(f"edge {e} has endpoint {v} out of range")
        seen = [False] * (2 * m)
        for v, ring in enumerate(self.rings):
            for d in ring:
                if not 0 <= d < 2 * m:
                    raise MalformedRing(f"vertex {v}: unknown dart {d}")
                if seen[d]:
                    raise MalformedRing(f"dart {dart_token(d)} appears twice")
                seen[d] = True
                if self.org(d) != v:
                    raise MalformedRing(
                        f"dart {dart_token(d)} listed at vertex {v} but belongs to {self.org(d)}")
        missing = [d for d in range(2 * m) if not seen[d]]
        if missing:
            raise MalformedRing(f"dart {dart_token(missing[0])} missing from rings")

    def copy(self) -> "PlaneMultigraph":
        g = PlaneMultigraph.__new__(PlaneMultigraph)
        g.n = self.n
        g.tail = list(self.tail)
        g.head = list(self.head)
        g.rings = [list(r) for r in self.rings]
        g.succ = list(self.succ)
        g.pred = list(self.pred)
        g.outer_dart = self.outer_dart
        return g

    def components(self) -> list[int]:
        """Weak component label of every vertex."""
        parent = list(range(self.n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for t, h in zip(self.tail, self.head):
            a, b = find(t), find(h)
            if a != b:
                parent[a] = b
        labels = {}
        out = []
        for v in range(self.n):
            r = find(v)
            out.append(labels.setdefault(r, len(labels)))
        return out

    def is_connected(self) -> bool:
        return self.n <= 1 or max(self.components()) == 0

    def without_edge(self, e: int) -> tuple["PlaneMultigraph", list[int]]:
        """Copy with edge ``e`` removed; also returns old-edge -> new-edge ids."""
        remap = []
        k = 0
        for f in range(self.m):
            if f == e:
                remap.append(-1)
            else:
                remap.append(k)
                k += 1
        edges = [(self.tail[f], self.head[f]) for f in range(self.m) if f != e]
        rings = []
        for ring in self.rings:
            rings.append([2 * remap[d >> 1] + (d & 1) for d in ring if d >> 1 != e])
        return PlaneMultigraph(self.n, edges, rings), remap

    def with_reverse_edges(self) -> "PlaneMultigraph":
        """Add a reverse copy of every edge, drawn right next to the original.

        The reverse of edge ``e`` gets id ``m + e``.  Around each vertex the
        new dart sits on the side that keeps the digon ``e, reverse(e)`` empty.
        """
        m = self.m
        edges = self.edges() + [(h, t) for t, h in self.edges()]
        rings = []
        for ring in self.rings:
            out = []
            for x in ring:
                y = 2 * (m + (x >> 1)) + (1 - (x & 1))
                out.extend((x, y) if x % 2 == 0 else (y, x))
            rings.append(out)
        return PlaneMultigraph(self.n, edges, rings)


def check_euler(g: PlaneMultigraph) -> None:
    """Raise NonPlanarRotation unless every component satisfies Euler's formula.

    Summed over components this is n - m + f = 1 + c where f counts the
    faces of the embedding (the outer faces of distinct components coincide).
    """
    comp = g.components()
    c = (max(comp) + 1) if g.n else 0
    nv = [0] * c
    ne = [0] * c
    nf = [0] * c
    for v in range(g.n):
        nv[comp[v]] += 1
    for t in g.tail:
        ne[comp[t]] += 1
    seen = bytearray(2 * g.m)
    for d0 in range(2 * g.m):
        if seen[d0]:
            continue
        nf[comp[g.org(d0)]] += 1
        d = d0
        while not seen[d]:
            seen[d] = 1
            d = g.succ[d ^ 1]
    for i in range(c):
        faces_i = nf[i] if ne[i] else 1
        if nv[i] - ne[i] + faces_i != 2:
            raise NonPlanarRotation(
                f"component {i}: {nv[i]} - {ne[i]} + {faces_i} != 2 (rotation is not planar)")


def build_from_rotation(n: int, rings: Sequence[Sequence[int]],
                        edges: Sequence[tuple[int, int]]) -> PlaneMultigraph:
    return PlaneMultigraph(n, edges, rings)


@dataclass
class FaceStructure:
    walks: list[list[int]]      # darts of each face, in face-permutation order
    face_of: list[int]          # dart -> face lying to its left
    outer: int | None           # index of the unbounded face

    @property
    def count(self) -> int:
        return len(self.walks)

    def vertices(self, g: PlaneMultigraph, f: int) -> list[int]:
        return [g.org(d) for d in self.walks[f]]

    def is_simple(self, g: PlaneMultigraph, f: int) -> bool:
        vs = self.vertices(g, f)
        return len(set(vs)) == len(vs)


def faces(g: PlaneMultigraph) -> FaceStructure:
    m2 = 2 * g.m
    face_of = [-1] * m2
    walks = []
    succ = g.succ
    for d0 in range(m2):
        if face_of[d0] != -1:
            continue
        f = len(walks)
        walk = []
        d = d0
        while face_of[d] == -1:
            face_of[d] = f
            walk.append(d)
            d = succ[d ^ 1]
        walks.append(walk)
    outer = face_of[g.outer_dart] if g.outer_dart is not None else None
    return FaceStructure(walks, face_of, outer)


def subset_face_walks(g: PlaneMultigraph, edge_ids: Iterable[int]) -> list[list[int]]:
    """Face walks of the sub-embedding induced by a set of edges."""
    edge_ids = list(edge_ids)
    inside = set(edge_ids)
    nxt = {}
    verts = set()
    for e in edge_ids:
        verts.add(g.tail[e])
        verts.add(g.head[e])
    for v in verts:
        ring = [d for d in g.rings[v] if (d >> 1) in inside]
        k = len(ring)
        for i, d in enumerate(ring):
            nxt[d] = ring[(i + 1) % k]
    seen = set()
    walks = []
    for e in edge_ids:
        for d0 in (2 * e, 2 * e + 1):
            if d0 in seen:
                continue
            walk = []
            d = d0
            while d not in seen:
                seen.add(d)
                walk.append(d)
                d = nxt[d ^ 1]
            walks.append(walk)
    return walks


@dataclass
class DualGraph:
    graph: PlaneMultigraph      # vertices are faces of the primal
    primal_faces: FaceStructure
    # dual edge e* has the same id as primal edge e

    def dual_edge(self, e: int) -> int:
        return e

    def primal_edge(self, e_star: int) -> int:
        return e_star


def dual(g: PlaneMultigraph) -> DualGraph:
    """Dual graph: e* runs from the face left of e to the face right of e."""
    if not g.is_connected():
        raise DisconnectedInput("dual is defined for connected plane graphs")
    fs = faces(g)
    edges = [(fs.face_of[2 * e], fs.face_of[2 * e + 1]) for e in range(g.m)]
    # the dual dart of primal dart d sits at the face left of d and carries
    # the same index; clockwise around a face is the reverse of its walk
    rings = [list(reversed(w)) for w in fs.walks]
    if not rings:
        rings = [[]]   # an edgeless graph has a single face
    dg = PlaneMultigraph(len(rings), edges, rings, outer_dart=0 if g.m else None)
    return DualGraph(dg, fs)


def contract_edge_abstract(n: int, edges: Sequence[tuple[int, int]], e: int):
    """Contract edge ``e`` of an abstract multigraph.

    Returns (vertex count, remaining edge list indexed like the input with
    ``None`` at ``e``, vertex map old -> new).
    """
    a, b = edges[e]
    vmap = []
    k = 0
    for v in range(n):
        if v == b and a != b:
            vmap.append(None)
        else:
            vmap.append(k)
            k += 1
    if a != b:
        vmap[b] = vmap[a]
    out = []
    for i, (t, h) in enumerate(edges):
        out.append(None if i == e else (vmap[t], vmap[h]))
    return k, out, vmap


def check_remove_contract_duality(g: PlaneMultigraph, e: int) -> bool:
    """dual(G - e) equals dual(G) with e* contracted, under the edge bijection."""
    gm, remap = g.without_edge(e)
    if not gm.is_connected():
        raise DisconnectedInput(f"removing edge {e} disconnects the graph")
    d_full = dual(g).graph
    d_rem = dual(gm).graph
    k, contracted, _ = contract_edge_abstract(d_full.n, d_full.edges(), e)
    if k != d_rem.n:
        return False
    phi: dict[int, int] = {}
    for f in range(g.m):
        if f == e:
            continue
        ct, ch = contracted[f]
        rt, rh = d_rem.tail[remap[f]], d_rem.head[remap[f]]
        for x, y in ((ct, rt), (ch, rh)):
            if phi.setdefault(x, y) != y:
                return False
    # the vertex map must be injective; uncovered vertices only occur when
    # e* was the sole dual edge, in which case both sides have one vertex
    return len(set(phi.values())) == len(phi)


def classify_edges_scc(g: PlaneMultigraph, *, check_dual: bool = True) -> list[str]:
    """Label every edge 'intra' or 'inter' (relative to strongly connected components)."""
    from .oracle import scc_labels

    lab = scc_labels(g.n, g.edges())
    out = ["intra" if lab[t] == lab[h] else "inter" for t, h in zip(g.tail, g.head)]
    if check_dual and g.m and g.is_connected():
        dg = dual(g).graph
        dlab = scc_labels(dg.n, dg.edges())
        for e in range(g.m):
            dual_intra = dlab[dg.tail[e]] == dlab[dg.head[e]]
            if (out[e] == "inter") != dual_intra:
                raise AssertionError(f"dual correspondence fails on edge {e}")
    return out


# -- text instance format ------------------------------------------------

def format_instance(g: PlaneMultigraph, comment: str | None = None) -> str:
    lines = []
    if comment:
        for c in comment.splitlines():
            lines.append(f"# {c}")
    lines.append(f"{g.n} {g.m}")
    for t, h in zip(g.tail, g.head):
        lines.append(f"{t} {h}")
    for ring in g.rings:
        lines.append(" ".join(dart_token(d) for d in ring) if ring else "-")
    return "\n".join(lines) + "\n"


def parse_instance(text: str) -> PlaneMultigraph:
    entries = []  # (line number, content) after comment stripping
    for no, raw in enumerate(text.splitlines(), start=1):
        if raw.lstrip().startswith("#"):
            continue
        entries.append((no, raw.split("#", 1)[0].strip()))
    pos = 0

    def next_nonblank():
        nonlocal pos
        while pos < len(entries) and not entries[pos][1]:
            pos += 1
        if pos >= len(entries):
            raise ParseError("unexpected end of input")
        item = entries[pos]
        pos += 1
        return item

    no, line = next_nonblank()
    parts = line.split()
    if len(parts) != 2:
        raise ParseError("header must be 'n m'", no)
    try:
        n, m = int(parts[0]), int(parts[1])
    except ValueError:
        raise ParseError("header must hold two integers", no) from None
    if n < 0 or m < 0:
        raise ParseError("negative sizes", no)
    edges = []
    for _ in range(m):
        no, line = next_nonblank()
        parts = line.split()
        try:
            t, h = int(parts[0]), int(parts[1])
        except (ValueError, IndexError):
            raise ParseError("edge line must be 'tail head'", no) from None
        if len(parts) != 2 or not (0 <= t < n and 0 <= h < n):
            raise ParseError("edge endpoints out of range", no)
        edges.append((t, h))
    # ring section: blank lines (or '-') denote empty rings; separator
    # blank lines are dropped only when more than n lines remain
    remaining = list(entries[pos:])
    while remaining and not remaining[-1][1]:
        remaining.pop()
    while len(remaining) > n and not remaining[0][1]:
        remaining.pop(0)
    rings = []
    for i in range(n):
        if i >= len(remaining):
            raise ParseError(f"missing ring for vertex {i}")
        no, line = remaining[i]
        ring = []
        if line and line != "-":
            for tok in line.split():
                try:
                    ring.append(parse_dart_token(tok))
                except ValueError as exc:
                    raise ParseError(str(exc), no) from None
        rings.append(ring)
    for no, line in remaining[n:]:
        if line:
            raise ParseError("trailing content", no)
    return PlaneMultigraph(n, edges, rings)


def read_instance(path) -> PlaneMultigraph:
    with open(path) as fh:
        return parse_instance(fh.read())


def write_instance(g: PlaneMultigraph, path, comment: str | None = None) -> None:
    with open(path, "w") as fh:
        fh.write(format_instance(g, comment))
