"""Seeded generators for embedded test instances (grid, triangulation, cyclegrid)."""

from __future__ import annotations

import math
import random

from .errors import BadParams
from .plane_graph import PlaneMultigraph


def _grid_shape(n: int) -> tuple[int, int]:
    k = math.isqrt(n)
    if k * k == n:
        return k, k
    rows = max(1, k)
    cols = -(-n // rows)
    return rows, cols


def _lattice(n: int):
    """Vertex positions and undirected lattice edges for an n-vertex grid.

    The last row may be partially filled when n is not rows*cols.
    """
    rows, cols = _grid_shape(n)
    pos = {}
    for v in range(n):
        pos[(v // cols, v % cols)] = v
    horiz = []
    vert = []
    for (r, c), v in pos.items():
        if (r, c + 1) in pos:
            horiz.append((r, c))
        if (r + 1, c) in pos:
            vert.append((r, c))
    return rows, cols, pos, horiz, vert


def _build(n, pos, oriented_edges):
    """oriented_edges: list of ((r1,c1), (r2,c2)) with geometric endpoints."""
    edges = []
    incident = {v: [] for v in range(n)}
    for a, b in oriented_edges:
        e = len(edges)
        va, vb = pos[a], pos[b]
        edges.append((va, vb))
        incident[va].append((b[0] - a[0], b[1] - a[1], 2 * e))
        incident[vb].append((a[0] - b[0], a[1] - b[1], 2 * e + 1))
    # clockwise on screen (rows grow downwards): up, right, down, left
    order = {(-1, 0): 0, (0, 1): 1, (1, 0): 2, (0, -1): 3}
    rings = []
    for v in range(n):
        rings.append([d for _, _, d in sorted(incident[v], key=lambda x: order[(x[0], x[1])])])
    return PlaneMultigraph(n, edges, rings)


def grid(n: int, seed: int = 0) -> PlaneMultigraph:
    """Near-square lattice on n vertices with seeded random edge directions."""
    if n < 1:
        raise BadParams("grid needs n >= 1")
    rng = random.Random(seed)
    _, _, pos, horiz, vert = _lattice(n)
    oriented = []
    for r, c in horiz:
        a, b = (r, c), (r, c + 1)
        oriented.append((a, b) if rng.random() < 0.5 else (b, a))
    for r, c in vert:
        a, b = (r, c), (r + 1, c)
        oriented.append((a, b) if rng.random() < 0.5 else (b, a))
    return _build(n, pos, oriented)


def cyclegrid(n: int, seed: int = 0) -> PlaneMultigraph:
    """Lattice whose square faces are all directed cycles (checkerboard orientation).

    The seed only picks which colour class of faces runs clockwise.
    """
    if n < 1:
        raise BadParams("cyclegrid needs n >= 1")
    flip = random.Random(seed).random() < 0.5
    _, _, pos, horiz, vert = _lattice(n)
    oriented = []
    for r, c in horiz:
        a, b = (r, c), (r, c + 1)
        fwd = ((r + c) % 2 == 0) != flip
        oriented.append((a, b) if fwd else (b, a))
    for r, c in vert:
        a, b = (r, c), (r + 1, c)
        up = ((r + c) % 2 == 0) != flip
        oriented.append((b, a) if up else (a, b))
    return _build(n, pos, oriented)


def _rings_to_graph(n, nbr, rng, directions=None):
    """Turn clockwise neighbour lists of a simple plane graph into a PlaneMultigraph."""
    eid = {}
    edges = []
    for v in range(n):
        for w in nbr[v]:
            key = (min(v, w), max(v, w))
            if key not in eid:
                eid[key] = len(edges)
                if directions is not None:
                    t, h = directions(key)
                else:
                    t, h = key if rng.random() < 0.5 else (key[1], key[0])
                edges.append((t, h))
    rings = []
    for v in range(n):
        ring = []
        for w in nbr[v]:
            e = eid[(min(v, w), max(v, w))]
            ring.append(2 * e if edges[e][0] == v else 2 * e + 1)
        rings.append(ring)
    return PlaneMultigraph(n, edges, rings)


def _insert_between(ring, x, y, new):
    j = ring.index(y)
    if ring[j - 1] == x:
        ring.insert(j, new)
    else:
        ring.insert(j + 1, new)


def triangulation(n: int, seed: int = 0, flips: int | None = None) -> PlaneMultigraph:
    """Maximal planar graph: a double wheel randomised by seeded edge flips."""
    if n < 3:
        raise BadParams("triangulation needs n >= 3")
    rng = random.Random(seed)
    if n == 3:
        return _rings_to_graph(3, [[1, 2], [2, 0], [0, 1]], rng)
    if n == 4:
        base = [[1, 2, 3], [0, 3, 2], [0, 1, 3], [0, 2, 1]]
        return _rings_to_graph(4, base, rng)
    # hub 0 inside, hub n-1 outside, rim 1..n-2 (clockwise around hub 0)
    rim = list(range(1, n - 1))
    k = len(rim)
    nbr = [[] for _ in range(n)]
    nbr[0] = list(rim)
    nbr[n - 1] = list(reversed(rim))
    for i, v in enumerate(rim):
        prv, nxt = rim[i - 1], rim[(i + 1) % k]
        nbr[v] = [0, prv, n - 1, nxt]
    adj = [set(x) for x in nbr]
    steps = flips if flips is not None else 4 * n
    for _ in range(steps):
        a = rng.randrange(n)
        if len(nbr[a]) <= 3:
            continue
        i = rng.randrange(len(nbr[a]))
        b = nbr[a][i]
        if len(nbr[b]) <= 3:
            continue
        c = nbr[a][(i + 1) % len(nbr[a])]
        d = nbr[a][i - 1]
        if c == d or d in adj[c]:
            continue
        # faces (a, b, c) and (a, d, b) around the edge ab become (a, d, c), (b, c, d)
        nbr[a].remove(b)
        nbr[b].remove(a)
        adj[a].discard(b)
        adj[b].discard(a)
        _insert_between(nbr[c], a, b, d)
        _insert_between(nbr[d], b, a, c)
        adj[c].add(d)
        adj[d].add(c)
    return _rings_to_graph(n, nbr, rng)


def sparse_planar(n: int, seed: int = 0, keep: float = 0.6) -> PlaneMultigraph:
    """Random triangulation with a random subset of edges removed (may disconnect)."""
    rng = random.Random(seed)
    g = triangulation(max(n, 3), seed)
    kept = [e for e in range(g.m) if rng.random() < keep]
    remap = {e: i for i, e in enumerate(kept)}
    edges = [(g.tail[e], g.head[e]) for e in kept]
    rings = [[2 * remap[d >> 1] + (d & 1) for d in ring if (d >> 1) in remap] for ring in g.rings]
    return PlaneMultigraph(g.n, edges, rings)


GENERATORS = {"grid": grid, "triangulation": triangulation, "cyclegrid": cyclegrid}


def generate(kind: str, n: int, seed: int = 0) -> PlaneMultigraph:
    try:
        fn = GENERATORS[kind]
    except KeyError:
        raise BadParams(f"unknown generator {kind!r}") from None
    return fn(n, seed)
