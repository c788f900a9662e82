import itertools
import random

import pytest

from planar_reach.errors import NonPlanarRotation
from planar_reach.plane_graph import PlaneMultigraph


def tiny(n, edges):
    """Embed a tiny multigraph by trying ring orders until Euler's formula holds."""
    darts = [[] for _ in range(n)]
    for e, (t, h) in enumerate(edges):
        darts[t].append(2 * e)
        darts[h].append(2 * e + 1)
    choices = []
    for ds in darts:
        if len(ds) <= 2:
            choices.append([list(ds)])
        else:
            choices.append([[ds[0], *p] for p in itertools.permutations(ds[1:])])
    for rings in itertools.product(*choices):
        try:
            return PlaneMultigraph(n, edges, rings)
        except NonPlanarRotation:
            continue
    raise ValueError("no planar embedding found")


def triangle():
    """a->b->c->a with a=0, b=1, c=2; edge ids 0: ab, 1: bc, 2: ca."""
    return PlaneMultigraph(3, [(0, 1), (1, 2), (2, 0)], [[0, 5], [2, 1], [4, 3]])


def single_edge():
    return PlaneMultigraph(2, [(0, 1)], [[0], [1]])


def live(g, deleted):
    return [None if deleted[e] else (g.tail[e], g.head[e]) for e in range(g.m)]


@pytest.fixture
def rng():
    return random.Random(12345)


def harvest(kind, n, seed, curves=None):
    """Reachability among the vertices of 1-3 vertex-disjoint simple faces.

    Returns the tracked matrix (every reachable ordered pair switched on) and a
    list of problems found by the validators.
    """
    from planar_reach.errors import BlockCapExceeded
    from planar_reach.generators import generate
    from planar_reach.monge import CurveOrder, PartitionedMatrix, verify_blocks, verify_monge
    from planar_reach.oracle import adjacency, reach_set
    from planar_reach.plane_graph import faces

    rnd = random.Random(seed)
    g = generate(kind, n, seed)
    fs = faces(g)
    want = curves or rnd.randint(1, 3)
    groups = _curve_faces(g, fs, rnd, want, outer_first=rnd.random() < 0.5)
    used = {v for grp in groups for v in grp}
    order = CurveOrder(groups)
    pm = PartitionedMatrix(order, track=True)
    # a random subgraph keeps the faces free of edges, so it is just as planar
    keep = rnd.choice([1.0, 0.8, 0.6])
    adj = adjacency(g.n, [uv for uv in g.edges() if rnd.random() < keep])
    pairs = [(u, v) for u in order.elements for v in reach_set(g.n, adj, u) & used if v != u]
    problems = []
    try:
        pm.apply_updates(pairs)
    except BlockCapExceeded as exc:
        return pm, [str(exc)]
    for M, mem in enumerate(pm.partition.members):
        sub = pm.submatrix(M)
        if mem.kind == "bipartite" and not verify_monge(sub):
            problems.append(f"member {M}: quadrangle condition fails")
        if not verify_blocks(sub):
            problems.append(f"member {M}: too many blocks for {mem.kind}")
    return pm, problems


def _curve_faces(g, fs, rnd, want, outer_first=False):
    used: set[int] = set()
    groups = []
    order = rnd.sample(range(fs.count), fs.count)
    if outer_first and fs.outer is not None:
        order.remove(fs.outer)
        order.insert(0, fs.outer)
    for f in order:
        vs = fs.vertices(g, f)
        if fs.is_simple(g, f) and not used & set(vs):
            groups.append(vs)
            used |= set(vs)
            if len(groups) == want:
                break
    return groups


def mc_sequence(seed, probe="intervals", pred="bitset", max_u=40):
    """Drive a MergeClosure with reachability matrices of two growing subgraphs.

    Both sides live in one plane graph with their vertices on simple faces, so
    the tracked block caps hold.  Returns a list of divergence messages.
    """
    from planar_reach.generators import generate
    from planar_reach.monge import CurveOrder, MergeClosure, PartitionedMatrix
    from planar_reach.oracle import adjacency, oracle_closure, reach_set
    from planar_reach.plane_graph import faces

    rnd = random.Random(seed)
    kind = rnd.choice(["grid", "triangulation", "cyclegrid"])
    g = generate(kind, rnd.randint(6, 60), seed)
    fs = faces(g)
    groups = _curve_faces(g, fs, rnd, 3, outer_first=rnd.random() < 0.7)
    # trim so that |U| stays small
    while sum(map(len, groups)) > max_u and len(groups) > 1:
        groups.pop()
    if sum(map(len, groups)) > max_u:
        groups = [groups[0][:max_u]]
    g1 = groups[: max(1, len(groups) - 1)]
    g2 = groups[min(1, len(groups) - 1):]
    orders = [CurveOrder(g1), CurveOrder(g2)]
    track = probe == "intervals"
    mats = [PartitionedMatrix(o, track=track) for o in orders]
    mc = MergeClosure(mats[0], mats[1], probe=probe, pred=pred)
    side_of = [rnd.randrange(2) for _ in range(g.m)]
    on = [[], []]
    have = [set(), set()]
    U = mc.U
    problems = []
    edges = rnd.sample(range(g.m), g.m)
    i = 0
    while i < len(edges):
        step = rnd.randint(1, 4)
        for e in edges[i:i + step]:
            on[side_of[e]].append((g.tail[e], g.head[e]))
        i += step
        batches = []
        for s in range(2):
            adj = adjacency(g.n, on[s])
            el = orders[s].elements
            members = set(el)
            now = {(u, v) for u in el for v in reach_set(g.n, adj, u) & members if u != v}
            batches.append((s, mats[s].apply_updates(sorted(now - have[s]))))
            have[s] = now
        before = mc.closure_pairs()
        flipped = set(mc.update(batches))
        truth = oracle_closure(U, list(have[0] | have[1]))
        got = mc.closure_pairs()
        want = {p for p, x in truth.items() if x}
        if got != want:
            problems.append(f"seed {seed}: closure differs on {len(got ^ want)} pairs")
            break
        if flipped != got - before:
            problems.append(f"seed {seed}: reported flips differ from the actual change")
        problems.extend(mc.candidate_violations())
        if problems:
            break
    if mc.pushes > mc.flips:
        problems.append(f"seed {seed}: {mc.pushes} pushes exceed {mc.flips} flips")
    return problems


KINDS = ("grid", "triangulation", "cyclegrid", "sparse")


def instance(seed, lo=10, hi=120):
    """Seeded random planar instance drawn from a mix of generators."""
    from planar_reach.generators import generate, sparse_planar

    rnd = random.Random(seed)
    kind = KINDS[seed % len(KINDS)]
    n = rnd.randint(lo, hi)
    g = sparse_planar(n, seed, keep=0.7) if kind == "sparse" else generate(kind, n, seed)
    return kind, g


def _pairs(n, rnd, cap=500, full_upto=60):
    if n <= full_upto:
        return [(u, v) for u in range(n) for v in range(n)]
    return [(rnd.randrange(n), rnd.randrange(n)) for _ in range(cap)]


def scc_ssr_run(seed, lo=10, hi=120):
    """Full deletion run checking DecSCC and DecSSR against the oracles after every step.

    Returns two problem lists: one for the SCC layer, one for single-source reachability.
    """
    from planar_reach.oracle import oracle_inter_scc, oracle_reachable_from, scc_labels
    from planar_reach.reductions import DecSSR

    kind, g = instance(seed, lo, hi)
    rnd = random.Random(seed + 1)
    s = rnd.randrange(g.n)
    ssr = DecSSR(g, s)
    scc = ssr.scc
    deleted = [False] * g.m
    bad_scc, bad_ssr = [], []
    prev = ssr.reachable_set()
    for e in rnd.sample(range(g.m), g.m):
        lost = ssr.delete(e)
        deleted[e] = True
        edges = live(g, deleted)
        lab = scc_labels(g.n, [x for x in edges if x is not None])
        for u, v in _pairs(g.n, rnd):
            if scc.same_scc(u, v) != (lab[u] == lab[v]):
                bad_scc.append(f"{kind} seed {seed}: same_scc({u},{v}) wrong after deleting {e}")
                break
        if scc.core.inter_set() != oracle_inter_scc(g.n, edges):
            bad_scc.append(f"{kind} seed {seed}: inter-SCC set wrong after deleting {e}")
        want = oracle_reachable_from(g.n, [x for x in edges if x is not None], s)
        now = ssr.reachable_set()
        if now != want:
            bad_ssr.append(f"{kind} seed {seed}: reachable set wrong after deleting {e}")
        if not now <= prev or set(lost) != prev - now:
            bad_ssr.append(f"{kind} seed {seed}: reachable set not monotone at {e}")
        prev = now
        if bad_scc or bad_ssr:
            break
    return bad_scc, bad_ssr


def bridge_run(seed, lo=10, hi=60):
    """Full deletion run checking strong bridges and the 2ECS partition after every step."""
    from planar_reach.oracle import oracle_2ecs, oracle_strong_bridges
    from planar_reach.reductions import Dec2ECS, DecStrongBridges

    kind, g = instance(seed, lo, hi)
    rnd = random.Random(seed + 2)
    sb = DecStrongBridges(g)
    ecs = Dec2ECS(g, order="fifo" if seed % 2 else "lifo")
    deleted = [False] * g.m
    problems = []
    for e in rnd.sample(range(g.m), g.m):
        sb.delete(e)
        ecs.delete(e)
        deleted[e] = True
        edges = live(g, deleted)
        if sb.strong_bridges() != oracle_strong_bridges(g.n, edges):
            problems.append(f"{kind} seed {seed}: bridge set wrong after deleting {e}")
        if ecs.twoecs_partition() != oracle_2ecs(g.n, edges):
            problems.append(f"{kind} seed {seed}: 2ECS partition wrong after deleting {e}")
        if ecs.strong_bridges():
            problems.append(f"{kind} seed {seed}: residual graph still has strong bridges")
        if problems:
            break
    return problems


def tc_run(seed, lo=10, hi=80, pairs=200, every=5):
    """Random switch-on order on IncTC, sampled pair queries against BFS."""
    from planar_reach.inc_tc import IncTC
    from planar_reach.oracle import adjacency, reach_set

    kind, g = instance(seed, lo, hi)
    rnd = random.Random(seed + 3)
    tc = IncTC(g)
    on = []
    problems = []
    order = rnd.sample(range(g.m), g.m)
    for i, e in enumerate(order, 1):
        tc.switch_on(e)
        on.append((g.tail[e], g.head[e]))
        if i % every and i != len(order):
            continue
        adj = adjacency(g.n, on)
        cache = {}
        for _ in range(pairs):
            u, w = rnd.randrange(g.n), rnd.randrange(g.n)
            if u not in cache:
                cache[u] = reach_set(g.n, adj, u)
            if tc.reachable(u, w) != (w in cache[u]):
                problems.append(f"{kind} seed {seed}: reachable({u},{w}) wrong after {i} switch-ons")
                return problems
            if tc.last.candidate_removals > tc.last.total_actcols:
                problems.append(f"{kind} seed {seed}: candidate removals exceed active columns")
                return problems
    return problems


def contract_oracle(g, contracted, u, w):
    """Reachability in the multigraph with the given edges contracted."""
    from planar_reach.oracle import adjacency, reach_set

    parent = list(range(g.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in contracted:
        parent[find(g.tail[e])] = find(g.head[e])
    adj = adjacency(g.n, [(find(g.tail[e]), find(g.head[e])) for e in range(g.m)])
    return find(w) in reach_set(g.n, adj, find(u))


def contraction_run(seed, lo=8, hi=40, pairs=60, every=3):
    from planar_reach.inc_tc import ContractionTC

    kind, g = instance(seed, lo, hi)
    rnd = random.Random(seed + 4)
    ct = ContractionTC(g)
    done = []
    for i, e in enumerate(rnd.sample(range(g.m), g.m), 1):
        ct.contract(e)
        done.append(e)
        if i % every:
            continue
        for _ in range(pairs):
            u, w = rnd.randrange(g.n), rnd.randrange(g.n)
            if ct.c_reachable(u, w) != contract_oracle(g, done, u, w):
                return [f"{kind} seed {seed}: c_reachable({u},{w}) wrong after {i} contractions"]
    return []


# one summary line per acceptance criterion, printed at the end of the run
ACCEPTANCE: dict[int, str] = {}


def record(criterion, ok, detail):
    line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE[criterion] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[k])
