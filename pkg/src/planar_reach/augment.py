"""Preprocessing pipeline: connect, expand vertices into directed cycles, triangulate.

Every stage returns an :class:`AugmentedGraph` that records how the output
relates to the input: which output edges form the strongly connected vertex
gadgets (``E0``), which output edge stands in for each input edge (``p``),
and which input vertex every output vertex came from (``orig``).  Stages
compose with :func:`compose`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import EmptyGraph, MismatchedStages, PreconditionViolated
from .plane_graph import PlaneMultigraph, faces

MAX_DEGREE = 12


@dataclass
class AugmentedGraph:
    graph: PlaneMultigraph              # output G'
    source: PlaneMultigraph             # input G
    p: list[int]                        # input edge -> output edge (image is E1)
    E0: frozenset[int]                  # gadget edges
    orig: list[int]                     # output vertex -> input vertex
    S: list[list[int]]                  # input vertex -> its output vertices
    D: int                              # max degree of the output
    steps: list[str] = field(default_factory=list)

    @property
    def E1(self) -> frozenset[int]:
        return frozenset(self.p)

    @property
    def fillers(self) -> frozenset[int]:
        return frozenset(range(self.graph.m)) - self.E0 - self.E1

    def representative(self, v: int) -> int:
        return self.S[v][0]


def _max_degree(g: PlaneMultigraph) -> int:
    return max((len(r) for r in g.rings), default=0)


def identity(g: PlaneMultigraph) -> AugmentedGraph:
    return AugmentedGraph(g, g, list(range(g.m)), frozenset(), list(range(g.n)),
                          [[v] for v in range(g.n)], _max_degree(g), ["identity"])


def connect(g: PlaneMultigraph) -> AugmentedGraph:
    """Join the components in a chain using one filler edge per consecutive pair.

    Each component is attached at its smallest vertex, inside the corner that
    follows the first dart of that vertex's ring, so all fillers live in one
    common face.
    """
    comp = g.components()
    ncomp = (max(comp) + 1) if g.n else 0
    if ncomp <= 1:
        out = identity(g)
        out.steps = ["connect"]
        return out
    reps = [-1] * ncomp
    for v in range(g.n):
        if reps[comp[v]] == -1:
            reps[comp[v]] = v
    edges = g.edges()
    rings = [list(r) for r in g.rings]
    for i in range(ncomp - 1):
        u, w = reps[i], reps[i + 1]
        e = len(edges)
        edges.append((u, w))
        for v, d in ((u, 2 * e), (w, 2 * e + 1)):
            ring = rings[v]
            ring.insert(1 if ring else 0, d)
    out_graph = PlaneMultigraph(g.n, edges, rings)
    return AugmentedGraph(out_graph, g, list(range(g.m)), frozenset(), list(range(g.n)),
                          [[v] for v in range(g.n)], _max_degree(out_graph), ["connect"])


def _zigzag(k: int) -> list[tuple[int, int]]:
    """Chords w1w3, w3wk, wkw4, w4w(k-1), ... as 0-based index pairs."""
    if k <= 3:
        return []
    chords = [(0, 2)]
    i, j = 2, k - 1
    step = 0
    while len(chords) < k - 3:
        if step == 0:
            chords.append((i, j))
        elif step % 2 == 1:
            chords.append((j, i + 1))
            i += 1
        else:
            chords.append((i, j - 1))
            j -= 1
        step += 1
    return chords


def expand_and_triangulate(g: PlaneMultigraph) -> AugmentedGraph:
    """Replace each vertex of ring length k by a directed 3k-cycle, then triangulate."""
    if g.m == 0:
        raise EmptyGraph("expansion needs at least one edge")
    if not g.is_connected():
        raise PreconditionViolated("expand_and_triangulate needs a connected graph")
    base = [0] * g.n
    total = 0
    for v in range(g.n):
        base[v] = total
        total += 3 * len(g.rings[v])
    orig = [0] * total
    S = []
    for v in range(g.n):
        k3 = 3 * len(g.rings[v])
        S.append(list(range(base[v], base[v] + k3)))
        for j in range(k3):
            orig[base[v] + j] = v
    edges: list[tuple[int, int]] = []
    # cycle edges: id of v_j -> v_{j+1} for each vertex
    cyc_id: dict[int, int] = {}
    for v in range(g.n):
        k3 = 3 * len(g.rings[v])
        for j in range(k3):
            a = base[v] + j
            b = base[v] + (j + 1) % k3
            cyc_id[a] = len(edges)
            edges.append((a, b))
    E0 = frozenset(range(len(edges)))
    # position of every dart inside its vertex ring (1-based)
    pos = [0] * (2 * g.m)
    for v in range(g.n):
        for i, d in enumerate(g.rings[v], start=1):
            pos[d] = i
    p = []
    for e in range(g.m):
        t, h = g.tail[e], g.head[e]
        a = base[t] + 3 * pos[2 * e] - 1
        b = base[h] + 3 * pos[2 * e + 1] - 1
        p.append(len(edges))
        edges.append((a, b))
    # the attachment vertex of each dart: gadget vertex v_{3i}
    attach_dart = {}
    for e in range(g.m):
        attach_dart[edges[p[e]][0]] = 2 * p[e]
        attach_dart[edges[p[e]][1]] = 2 * p[e] + 1
    rings = []
    for v in range(g.n):
        k3 = 3 * len(g.rings[v])
        for j in range(k3):
            x = base[v] + j
            prev = base[v] + (j - 1) % k3
            ring = []
            if x in attach_dart:
                ring.append(attach_dart[x])
            ring.append(2 * cyc_id[x])
            ring.append(2 * cyc_id[prev] + 1)
            rings.append(ring)
    h = PlaneMultigraph(total, edges, rings)
    fs = faces(h)
    tail = [t for t, _ in edges]
    # inserts[dart] -> list of (key, new dart) placed right after that dart
    inserts: dict[int, list[tuple[int, int]]] = {}
    for walk in fs.walks:
        k = len(walk)
        if k <= 3:
            continue
        verts = [h.org(d) for d in walk]
        chords = _zigzag(k)
        for r in range(k):
            if all(verts[(a + r) % k] != verts[(b + r) % k] for a, b in chords):
                break
        else:
            raise PreconditionViolated("cannot triangulate a face without creating a loop")
        for a, b in chords:
            i, j = (a + r) % k, (b + r) % k
            if i > j:
                i, j = j, i
            e = len(edges)
            edges.append((verts[i], verts[j]))
            tail.append(verts[i])
            for here, there, d in ((i, j, 2 * e), (j, i, 2 * e + 1)):
                before = walk[(here - 1) % k] ^ 1
                key = (here - 1 - there) % k
                inserts.setdefault(before, []).append((key, d))
    new_rings = []
    for ring in rings:
        out = []
        for d in ring:
            out.append(d)
            if d in inserts:
                out.extend(nd for _, nd in sorted(inserts[d]))
        new_rings.append(out)
    g2 = PlaneMultigraph(total, edges, new_rings)
    for walk in faces(g2).walks:
        if len(walk) != 3:
            raise PreconditionViolated(f"face of size {len(walk)} after triangulation")
    D = _max_degree(g2)
    if D > MAX_DEGREE:
        raise PreconditionViolated(f"degree {D} exceeds {MAX_DEGREE}")
    return AugmentedGraph(g2, g, p, E0, orig, S, D, ["expand_and_triangulate"])


def compose(step1: AugmentedGraph, step2: AugmentedGraph) -> AugmentedGraph:
    """Chain two stages: p = p2 . p1 and E0 = E0_2 + p2(E0_1)."""
    if step2.source is not step1.graph:
        raise MismatchedStages("second stage does not consume the first stage's output")
    p = [step2.p[x] for x in step1.p]
    E0 = frozenset(step2.E0) | frozenset(step2.p[x] for x in step1.E0)
    orig = [step1.orig[x] for x in step2.orig]
    S = [[y for x in group for y in step2.S[x]] for group in step1.S]
    return AugmentedGraph(step2.graph, step1.source, p, E0, orig, S, step2.D,
                          step1.steps + step2.steps)


def preprocess(g: PlaneMultigraph) -> AugmentedGraph:
    """connect followed by expand_and_triangulate."""
    c = connect(g)
    return compose(c, expand_and_triangulate(c.graph))
