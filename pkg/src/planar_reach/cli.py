"""Command line harness: instance generation, script runs, oracle validation, benchmarks.

Scripts hold one command per line (``#`` starts a comment)::

    DEL <edge>        delete an edge (scc, ssr, bridges, twoecs)
    QSCC <u> <v>      same strongly connected component?
    QSSR <v>          reachable from the source?
    QBRIDGES          current strong bridges
    Q2ECS             current maximal 2-edge-connected partition
    ON <edge>         switch an edge on (inctc)
    CONTRACT <edge>   contract an edge (inctc)
    QTC <u> <w>       does u reach w?

Every command produces one JSON line; a header line comes first.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import random
import sys
import time
from dataclasses import dataclass, field

from . import oracle
from .decomposition import HOLE_CAP, LEAF_THRESHOLD, build_simple_decomposition
from .errors import BadParams, ParseError, PlanarReachError
from .generators import GENERATORS, generate
from .monge import BLOCK_CAP
from .plane_graph import PlaneMultigraph, read_instance, write_instance

log = logging.getLogger("planar_reach")

RUN_MODES = ("scc", "ssr", "bridges", "twoecs", "inctc")
MODES = RUN_MODES + ("validate", "bench", "gen")
VERBS = {
    "DEL": 1, "QSCC": 2, "QSSR": 1, "QBRIDGES": 0, "Q2ECS": 0,
    "ON": 1, "CONTRACT": 1, "QTC": 2,
}
ALLOWED = {
    "scc": {"DEL", "QSCC"},
    "ssr": {"DEL", "QSSR", "QSCC"},
    "bridges": {"DEL", "QBRIDGES", "QSCC"},
    "twoecs": {"DEL", "Q2ECS"},
    "inctc": {"ON", "CONTRACT", "QTC"},
}


@dataclass
class RunConfig:
    mode: str
    instance: str | None = None
    script: str | None = None
    seed: int = 0
    out: str | None = None
    oracle_lockstep: bool = False
    dump_tree: str | None = None
    dump_mappings: str | None = None
    leaf_threshold: int = LEAF_THRESHOLD
    hole_cap: int = HOLE_CAP
    block_cap: int = BLOCK_CAP
    source: int = 0
    kind: str = "grid"
    n: int = 16
    count: int = 10
    sizes: list[int] = field(default_factory=lambda: [1000, 4000, 16000])

    def check(self) -> None:
        if self.mode not in MODES:
            raise BadParams(f"unknown mode {self.mode!r}")
        if self.mode in RUN_MODES and (self.instance is None or self.script is None):
            raise BadParams(f"mode {self.mode} needs --in and --script")
        if self.mode == "gen" and self.n < 1:
            raise BadParams("gen needs n >= 1")

    def build_kw(self) -> dict:
        return dict(leaf_threshold=self.leaf_threshold, hole_cap=self.hole_cap,
                    block_cap=self.block_cap)


def parse_script(text: str) -> list[tuple[int, str, list[int]]]:
    """Returns (line number, verb, integer arguments) triples."""
    out = []
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        verb = toks[0].upper()
        if verb not in VERBS:
            raise ParseError(f"unknown command {toks[0]!r}", no)
        if len(toks) - 1 != VERBS[verb]:
            raise ParseError(f"{verb} takes {VERBS[verb]} argument(s)", no)
        try:
            args = [int(t) for t in toks[1:]]
        except ValueError:
            raise ParseError(f"non-integer argument in {line!r}", no) from None
        out.append((no, verb, args))
    return out


def _live_edges(g: PlaneMultigraph, deleted) -> list:
    return [None if deleted[e] else (g.tail[e], g.head[e]) for e in range(g.m)]


class Session:
    """One dynamic structure driven by script commands, optionally checked against oracles."""

    def __init__(self, g: PlaneMultigraph, cfg: RunConfig, script):
        from . import inc_tc, reductions
        self.g = g
        self.cfg = cfg
        self.mode = cfg.mode
        self.lockstep = cfg.oracle_lockstep
        kw = cfg.build_kw()
        self.deleted = [False] * g.m
        self.on: set[int] = set()
        self.groups = list(range(g.n))
        self.contract_mode = any(v == "CONTRACT" for _, v, _ in script)
        if self.mode == "scc":
            self.ds = reductions.DecSCC(g, **kw)
        elif self.mode == "ssr":
            if not 0 <= cfg.source < g.n:
                raise BadParams(f"source {cfg.source} out of range")
            self.ds = reductions.DecSSR(g, cfg.source, **kw)
        elif self.mode == "bridges":
            self.ds = reductions.DecStrongBridges(g, **kw)
        elif self.mode == "twoecs":
            self.ds = reductions.Dec2ECS(g, **kw)
        elif self.contract_mode:
            self.ds = inc_tc.ContractionTC(g, **kw)
        else:
            self.ds = inc_tc.IncTC(g, **kw)

    def structures(self):
        """(augmented mapping, tree) of the underlying switch-on structure."""
        ds = self.ds
        if self.mode == "inctc":
            tc = ds.tc if self.contract_mode else ds
            return tc.aug, tc.tree
        core = ds.scc.core if self.mode == "ssr" else ds.core
        return core.aug, core.tree

    def _scc_ds(self):
        return self.ds.scc if self.mode == "ssr" else self.ds

    def _find(self, x: int) -> int:
        while self.groups[x] != x:
            self.groups[x] = self.groups[self.groups[x]]
            x = self.groups[x]
        return x

    def apply(self, verb: str, args: list[int]) -> dict:
        if verb not in ALLOWED[self.mode]:
            raise BadParams(f"{verb} is not available in mode {self.mode}")
        ds = self.ds
        res: dict = {"op": verb, "args": args}
        if verb == "DEL":
            (e,) = args
            if self.mode == "scc":
                res["new_inter"] = sorted(ds.delete(e))
            elif self.mode == "ssr":
                res["unreachable"] = ds.delete(e)
            else:
                gained, lost = ds.delete(e)
                res["gained"], res["lost"] = sorted(gained), sorted(lost)
            self.deleted[e] = True
        elif verb == "QSCC":
            res["same"] = self._scc_ds().same_scc(*args)
        elif verb == "QSSR":
            res["reachable"] = ds.reachable(*args)
        elif verb == "QBRIDGES":
            res["bridges"] = sorted(ds.strong_bridges())
        elif verb == "Q2ECS":
            res["partition"] = [sorted(c) for c in ds.twoecs_partition()]
        elif verb == "ON":
            if self.contract_mode:
                raise BadParams("ON cannot be mixed with CONTRACT")
            ds.switch_on(args[0])
            self.on.add(args[0])
        elif verb == "CONTRACT":
            (e,) = args
            ds.contract(e)
            a, b = self._find(self.g.tail[e]), self._find(self.g.head[e])
            self.groups[a] = b
        elif verb == "QTC":
            u, w = args
            res["reachable"] = ds.c_reachable(u, w) if self.contract_mode else ds.reachable(u, w)
        return res

    def check(self, verb: str, args: list[int], res: dict) -> str | None:
        """Compare against the oracles; returns a description of the first divergence."""
        g = self.g
        live = _live_edges(g, self.deleted)
        edges = [x for x in live if x is not None]
        if self.mode in ("scc", "ssr", "bridges") and verb in ("DEL", "QSCC"):
            want = oracle.oracle_scc(g.n, edges)
            if self._scc_ds().partition() != want:
                return "SCC partition differs"
            if self.mode != "bridges" and self._scc_ds().core.inter_set() != oracle.oracle_inter_scc(g.n, live):
                return "inter-SCC edge set differs"
        if self.mode == "ssr" and verb in ("DEL", "QSSR"):
            want = oracle.oracle_reachable_from(g.n, edges, self.cfg.source)
            if self.ds.reachable_set() != want:
                return "reachable set differs"
        if self.mode == "bridges" and verb in ("DEL", "QBRIDGES"):
            if self.ds.strong_bridges() != oracle.oracle_strong_bridges(g.n, live):
                return "strong bridges differ"
        if self.mode == "twoecs" and verb in ("DEL", "Q2ECS"):
            if self.ds.twoecs_partition() != oracle.oracle_2ecs(g.n, live):
                return "2ECS partition differs"
        if verb == "QTC":
            u, w = args
            if self.contract_mode:
                cedges = [(self._find(g.tail[e]), self._find(g.head[e])) for e in range(g.m)]
                want = oracle.oracle_reach(g.n, cedges, self._find(u), self._find(w))
            else:
                want = oracle.oracle_reach(g.n, [(g.tail[e], g.head[e]) for e in self.on], u, w)
            if res["reachable"] != want:
                return f"reachability {u}->{w} differs (oracle says {want})"
        return None


def _emit(fh, obj) -> None:
    fh.write(json.dumps(obj, sort_keys=True) + "\n")


def run(cfg: RunConfig, fh) -> int:
    """Execute a script; returns the process exit status."""
    g = read_instance(cfg.instance)
    with open(cfg.script) as sfh:
        script = parse_script(sfh.read())
    sess = Session(g, cfg, script)
    aug, tree = sess.structures()
    if cfg.dump_tree:
        tree.dump(cfg.dump_tree)
    if cfg.dump_mappings:
        with open(cfg.dump_mappings, "w") as mfh:
            json.dump({"p": aug.p, "E0": sorted(aug.E0), "orig": aug.orig, "S": aug.S,
                       "D": aug.D, "steps": aug.steps}, mfh)
    _emit(fh, {"mode": cfg.mode, "n": g.n, "m": g.m, "seed": cfg.seed,
               "lockstep": cfg.oracle_lockstep, "commands": len(script)})
    status = 0
    for no, verb, args in script:
        try:
            res = sess.apply(verb, args)
        except PlanarReachError as exc:
            _emit(fh, {"line": no, "op": verb, "args": args, "error": type(exc).__name__,
                       "message": str(exc)})
            status = 3
            continue
        res["line"] = no
        _emit(fh, res)
        if cfg.oracle_lockstep:
            bad = sess.check(verb, args, res)
            if bad:
                _emit(fh, {"line": no, "divergence": bad})
                return 1
    return status


def random_script(g: PlaneMultigraph, mode: str, rng: random.Random) -> list[tuple[int, str, list[int]]]:
    order = list(range(g.m))
    rng.shuffle(order)
    out = []
    q = {"scc": "QSCC", "ssr": "QSSR", "bridges": "QBRIDGES", "twoecs": "Q2ECS"}
    for e in order:
        if mode == "inctc":
            out.append(("ON", [e]))
            u, w = rng.randrange(g.n), rng.randrange(g.n)
            out.append(("QTC", [u, w]))
            continue
        out.append(("DEL", [e]))
        verb = q[mode]
        if verb == "QSCC":
            out.append((verb, [rng.randrange(g.n), rng.randrange(g.n)]))
        elif verb == "QSSR":
            out.append((verb, [rng.randrange(g.n)]))
        else:
            out.append((verb, []))
    return [(i + 1, v, a) for i, (v, a) in enumerate(out)]


def validate(cfg: RunConfig, fh) -> int:
    """Lockstep dynamic-vs-oracle runs; with --in/--script checks that pair, otherwise a seeded sweep."""
    cases = []
    if cfg.instance:
        g = read_instance(cfg.instance)
        if cfg.script:
            with open(cfg.script) as sfh:
                script = parse_script(sfh.read())
            verbs = {v for _, v, _ in script}
            modes = [m for m in RUN_MODES if verbs <= ALLOWED[m]] or ["scc"]
            cases.append((g, modes[0], script, "given"))
        else:
            rng = random.Random(cfg.seed)
            for mode in RUN_MODES:
                cases.append((g, mode, random_script(g, mode, rng), "given"))
    else:
        rng = random.Random(cfg.seed)
        kinds = sorted(GENERATORS)
        for i in range(cfg.count):
            kind = kinds[i % len(kinds)]
            n = rng.randint(max(3, min(10, cfg.n)), cfg.n)
            g = generate(kind, n, rng.randrange(1 << 30))
            mode = RUN_MODES[i % len(RUN_MODES)]
            cases.append((g, mode, random_script(g, mode, rng), f"{kind}:{n}"))
    failures = 0
    for idx, (g, mode, script, label) in enumerate(cases):
        sub = RunConfig(**{**cfg.__dict__, "mode": mode, "oracle_lockstep": True})
        sess = Session(g, sub, script)
        first = None
        for no, verb, args in script:
            try:
                res = sess.apply(verb, args)
            except PlanarReachError as exc:
                first = f"line {no}: {type(exc).__name__}: {exc}"
                break
            bad = sess.check(verb, args, res)
            if bad:
                first = f"line {no}: {bad}"
                break
        failures += first is not None
        _emit(fh, {"case": idx, "instance": label, "mode": mode, "commands": len(script),
                   "divergence": first})
    _emit(fh, {"cases": len(cases), "divergent": failures})
    return 1 if failures else 0


def bench_one(kind: str, n: int, seed: int, kw: dict) -> dict:
    """Build the pipeline on one instance and switch every edge on in random order."""
    from .switch_on import SwitchOnReach
    g = generate(kind, n, seed)
    t0 = time.perf_counter()
    aug, tree = build_simple_decomposition(g, leaf_threshold=kw["leaf_threshold"],
                                           hole_cap=kw["hole_cap"])
    t1 = time.perf_counter()
    sw = SwitchOnReach(tree, aug, block_cap=kw["block_cap"])
    t2 = time.perf_counter()
    order = list(range(g.m))
    random.Random(seed).shuffle(order)
    for e in order:
        sw.switch_on(e)
    t3 = time.perf_counter()
    row = {"kind": kind, "n": n, "m": g.m, "n_expanded": tree.graph.n,
           "pieces": len(tree.pieces), "build_s": round(t1 - t0, 3),
           "init_s": round(t2 - t1, 3), "updates_s": round(t3 - t2, 3),
           "total_s": round(t3 - t0, 3)}
    row.update(sw.stats())
    return row


def bench(cfg: RunConfig, fh) -> int:
    rows = []
    for n in cfg.sizes:
        rows.append(bench_one(cfg.kind, n, cfg.seed, cfg.build_kw()))
        _emit(fh, rows[-1])
    print(f"{'n':>8} {'n_exp':>9} {'total_s':>9} {'ratio':>7} {'flips':>10} {'pushes':>9}",
          file=sys.stderr)
    prev = None
    for r in rows:
        ratio = r["total_s"] / prev if prev else float("nan")
        print(f"{r['n']:>8} {r['n_expanded']:>9} {r['total_s']:>9.2f} {ratio:>7.2f} "
              f"{r['matrix_flips']:>10} {r['queue_pushes']:>9}", file=sys.stderr)
        prev = r["total_s"]
    return 0


def gen(cfg: RunConfig, fh) -> int:
    g = generate(cfg.kind, cfg.n, cfg.seed)
    comment = f"{cfg.kind} n={cfg.n} seed={cfg.seed}"
    if cfg.out:
        write_instance(g, cfg.out, comment)
    else:
        from .plane_graph import format_instance
        sys.stdout.write(format_instance(g, comment))
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="planar-reach", description=__doc__.splitlines()[0])
    ap.add_argument("--mode", required=True, choices=MODES)
    ap.add_argument("--in", dest="instance")
    ap.add_argument("--script")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out")
    ap.add_argument("--oracle-lockstep", action="store_true")
    ap.add_argument("--dump-tree")
    ap.add_argument("--dump-mappings")
    ap.add_argument("--leaf-threshold", type=int, default=LEAF_THRESHOLD)
    ap.add_argument("--hole-cap", type=int, default=HOLE_CAP)
    ap.add_argument("--block-cap", type=int, default=BLOCK_CAP)
    ap.add_argument("--source", type=int, default=0, help="source vertex for ssr")
    ap.add_argument("--kind", default="grid", choices=sorted(GENERATORS))
    ap.add_argument("--n", type=int, default=16, help="vertex count for gen, max n for validate")
    ap.add_argument("--count", type=int, default=10, help="instances in a validate sweep")
    ap.add_argument("--sizes", default="1000,4000,16000", help="comma separated bench sizes")
    return ap


def main(argv=None) -> int:
    level = os.environ.get("PLANAR_REACH_LOG")
    if level:
        logging.basicConfig(level=level.upper(), stream=sys.stderr,
                            format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        sizes = [int(x) for x in args.sizes.split(",") if x]
    except ValueError:
        print("error: --sizes must be integers", file=sys.stderr)
        return 2
    cfg = RunConfig(mode=args.mode, instance=args.instance, script=args.script, seed=args.seed,
                    out=args.out, oracle_lockstep=args.oracle_lockstep, dump_tree=args.dump_tree,
                    dump_mappings=args.dump_mappings, leaf_threshold=args.leaf_threshold,
                    hole_cap=args.hole_cap, block_cap=args.block_cap, source=args.source,
                    kind=args.kind, n=args.n, count=args.count, sizes=sizes)
    try:
        cfg.check()
        if cfg.mode == "gen":
            return gen(cfg, sys.stdout)
        fh = open(cfg.out, "w") if cfg.out else sys.stdout
        try:
            if cfg.mode == "validate":
                return validate(cfg, fh)
            if cfg.mode == "bench":
                return bench(cfg, fh)
            return run(cfg, fh)
        finally:
            if fh is not sys.stdout:
                fh.close()
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (PlanarReachError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
