"""Brute-force reference answers used to validate the dynamic structures.

Every public ``oracle_*`` function recomputes from scratch and refuses
inputs with more than ``ORACLE_MAX_N`` vertices.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Sequence

ORACLE_MAX_N = 500


def _guard(n: int) -> None:
    if n > ORACLE_MAX_N:
        raise ValueError(f"oracle refuses n={n} > {ORACLE_MAX_N}")


def adjacency(n: int, edges: Iterable[tuple[int, int]]) -> list[list[int]]:
    adj = [[] for _ in range(n)]
    for t, h in edges:
        adj[t].append(h)
    return adj


def scc_labels(n: int, edges: Iterable[tuple[int, int]]) -> list[int]:
    """Iterative Tarjan; returns a component id per vertex."""
    adj = adjacency(n, edges)
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    comp = [-1] * n
    stack = []
    counter = 0
    ncomp = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        while work:
            v, i = work[-1]
            if i < len(adj[v]):
                work[-1] = (v, i + 1)
                w = adj[v][i]
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, 0))
                elif on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
            else:
                work.pop()
                if work:
                    u = work[-1][0]
                    if low[v] < low[u]:
                        low[u] = low[v]
                if low[v] == index[v]:
                    while True:
                        w = stack.pop()
                        on_stack[w] = False
                        comp[w] = ncomp
                        if w == v:
                            break
                    ncomp += 1
    return comp


def reach_set(n: int, adj: Sequence[Sequence[int]], src: int) -> set[int]:
    seen = {src}
    dq = deque([src])
    while dq:
        v = dq.popleft()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                dq.append(w)
    return seen


def oracle_reach(n: int, edges: Iterable[tuple[int, int]], u: int, w: int) -> bool:
    _guard(n)
    return w in reach_set(n, adjacency(n, edges), u)


def oracle_reachable_from(n: int, edges: Iterable[tuple[int, int]], s: int) -> set[int]:
    _guard(n)
    return reach_set(n, adjacency(n, edges), s)


def _partition(labels: Sequence[int]) -> list[frozenset[int]]:
    groups: dict[int, set[int]] = {}
    for v, c in enumerate(labels):
        groups.setdefault(c, set()).add(v)
    return sorted((frozenset(g) for g in groups.values()), key=min)


def oracle_scc(n: int, edges: Iterable[tuple[int, int]]) -> list[frozenset[int]]:
    _guard(n)
    return _partition(scc_labels(n, edges))


def oracle_inter_scc(n: int, edges: Sequence[tuple[int, int] | None]) -> set[int]:
    """Ids of edges whose endpoints lie in different SCCs (None entries are absent edges)."""
    _guard(n)
    lab = scc_labels(n, [e for e in edges if e is not None])
    return {i for i, e in enumerate(edges) if e is not None and lab[e[0]] != lab[e[1]]}


def _scc_count(n, edges):
    lab = scc_labels(n, edges)
    return (max(lab) + 1) if n else 0


def oracle_strong_bridges(n: int, edges: Sequence[tuple[int, int] | None]) -> set[int]:
    """Edges whose removal increases the number of SCCs (per-edge removal test)."""
    _guard(n)
    live = [i for i, e in enumerate(edges) if e is not None]
    base = _scc_count(n, [edges[i] for i in live])
    out = set()
    for i in live:
        rest = [edges[j] for j in live if j != i]
        if _scc_count(n, rest) > base:
            out.add(i)
    return out


def oracle_2ecs(n: int, edges: Sequence[tuple[int, int] | None]) -> list[frozenset[int]]:
    """SCCs after removing strong bridges repeatedly until none remain."""
    _guard(n)
    cur = list(edges)
    while True:
        bridges = oracle_strong_bridges(n, cur)
        if not bridges:
            break
        for i in bridges:
            cur[i] = None
    return _partition(scc_labels(n, [e for e in cur if e is not None]))


def oracle_closure(vertices: Sequence, edges: Iterable[tuple]) -> dict:
    """Cubic (Floyd-Warshall style) closure; returns {(u, w): bool} off the diagonal."""
    vs = list(vertices)
    _guard(len(vs))
    idx = {v: i for i, v in enumerate(vs)}
    k = len(vs)
    mat = [[False] * k for _ in range(k)]
    for t, h in edges:
        mat[idx[t]][idx[h]] = True
    for m in range(k):
        row_m = mat[m]
        for i in range(k):
            if mat[i][m]:
                row_i = mat[i]
                for j in range(k):
                    if row_m[j]:
                        row_i[j] = True
    return {(vs[i], vs[j]): mat[i][j] for i in range(k) for j in range(k) if i != j}


def closure_bits(k: int, succ_bits: Sequence[int]) -> list[int]:
    """Reflexive-transitive closure of a small graph given as successor bitmasks."""
    reach = [succ_bits[i] | (1 << i) for i in range(k)]
    changed = True
    while changed:
        changed = False
        for i in range(k):
            r = reach[i]
            acc = r
            x = r
            while x:
                low = x & -x
                j = low.bit_length() - 1
                acc |= reach[j]
                x ^= low
            if acc != r:
                reach[i] = acc
                changed = True
    return reach
