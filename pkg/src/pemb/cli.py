"""Command line front end: generate, build, query, bench."""

import argparse
import csv
import os
import statistics
import sys
import time

import numpy as np

from .accounting import MemoryAccountant
from .construct import CompactEmbedding, build_compact, sequential_build
from .embedding import (PgFormatError, generate_grid_triangulation, load_pg,
                        save_pg)
from .queries import Navigator
from .spanning import (claim_parent_edges, dfs_parent_edges,
                       tree_structures_from_edges)

PHASES = ("spanning-tree", "euler", "list-rank", "scatter", "bstar",
          "support", "total")


def _default_threads() -> int:
    try:
        return max(1, int(os.environ.get("PEMB_THREADS", "1")))
    except ValueError:
        return 1


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _thread_list(text: str):
    try:
        values = [int(p) for p in text.split(",") if p]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad thread list {text!r}")
    if not values or any(v < 1 for v in values):
        raise argparse.ArgumentTypeError(f"bad thread list {text!r}")
    return values


def _build_once(emb, threads: int, deterministic: bool, seq: bool,
                timings: dict, accountant):
    t0 = time.perf_counter()
    if seq or deterministic:
        parent_ref = dfs_parent_edges(emb, 0, accountant)
    else:
        parent_ref = claim_parent_edges(emb, threads, 0, accountant)
    tree = tree_structures_from_edges(emb, parent_ref, threads, 0, accountant)
    timings["spanning-tree"] = time.perf_counter() - t0
    if seq:
        compact = sequential_build(emb, tree, 1, timings, accountant)
    else:
        compact = build_compact(emb, tree, 1, threads, timings, accountant)
    timings["total"] += timings["spanning-tree"]
    return compact


def cmd_generate(args) -> int:
    emb = generate_grid_triangulation(args.side, args.seed)
    save_pg(emb, args.out)
    print(f"wrote {args.out}: n={emb.n} m={emb.m} faces={emb.face_count()}")
    return 0


def cmd_build(args) -> int:
    emb = load_pg(getattr(args, "in"))
    timings = {}
    accountant = MemoryAccountant(emb.input_bytes)
    compact = _build_once(emb, args.threads, args.deterministic, args.seq,
                          timings, accountant)
    compact.save(args.out)
    mode = "seq" if args.seq else f"par p={args.threads}"
    print(f"built {args.out} ({mode}): n={compact.n} m={compact.m} "
          f"payload={compact.payload_bits} bits "
          f"support={compact.support_bits} bits "
          f"peak={accountant.peak} bytes "
          f"total={timings['total']:.6f}s")
    return 0


def cmd_query(args) -> int:
    compact = CompactEmbedding.load(getattr(args, "in"))
    nav = Navigator(compact)
    if args.op == "counting":
        print(nav.counting(args.arg))
    elif args.op == "listing":
        print(" ".join(str(v) for v in nav.listing(args.arg)))
    else:
        print(" ".join(str(v) for v in nav.face(args.arg)))
    return 0


def _bench_queries(nav, n, m, rng):
    rounds = 10
    nv = min(n, 10 ** 5)
    ne = min(2 * m, 10 ** 5)
    verts = rng.integers(1, n + 1, size=nv)
    tcks = rng.integers(1, 2 * m + 1, size=ne)
    t0 = time.perf_counter()
    for _ in range(rounds):
        for v in verts:
            nav.counting(int(v))
    t_count = time.perf_counter() - t0
    t0 = time.perf_counter()
    for _ in range(rounds):
        for v in verts:
            nav.listing(int(v))
    t_list = time.perf_counter() - t0
    t0 = time.perf_counter()
    for _ in range(rounds):
        for t in tcks:
            nav.face(int(t))
    t_face = time.perf_counter() - t0
    print(f"queries: counting {t_count / (rounds * nv):.9f}s "
          f"listing {t_list / (rounds * nv):.9f}s "
          f"face {t_face / (rounds * ne):.9f}s per call")


def cmd_bench(args) -> int:
    path = getattr(args, "in")
    emb = load_pg(path)
    dataset = os.path.basename(path)
    rows = []

    def run(threads, seq):
        per_phase = {p: [] for p in PHASES}
        peaks = []
        compact = None
        for _ in range(args.reps):
            timings = {}
            accountant = MemoryAccountant(emb.input_bytes)
            compact = _build_once(emb, threads, False, seq, timings, accountant)
            for p in PHASES:
                per_phase[p].append(timings[p])
            peaks.append(accountant.peak)
        peak = int(statistics.median(peaks))
        for p in PHASES:
            rows.append({
                "dataset": dataset, "n": emb.n, "m": emb.m,
                "threads": 0 if seq else threads, "phase": p,
                "median_seconds": f"{statistics.median(per_phase[p]):.6f}",
                "peak_bytes": peak,
                "payload_bits": compact.payload_bits,
                "support_bits": compact.support_bits,
            })
        return compact

    compact = run(1, seq=True)
    for p in args.threads:
        compact = run(p, seq=False)
    with open(args.csv, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {args.csv}: {len(rows)} rows")
    if args.queries:
        _bench_queries(Navigator(compact), emb.n, emb.m,
                       np.random.default_rng(0))
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pemb",
        description="Compact planar embeddings: build and query")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a triangulated grid as .pg")
    p.add_argument("--side", type=_positive_int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("build", help="encode a .pg embedding")
    p.add_argument("--in", required=True)
    p.add_argument("--threads", type=_positive_int, default=_default_threads())
    p.add_argument("--seq", action="store_true",
                   help="use the sequential reference builder")
    p.add_argument("--deterministic", action="store_true",
                   help="deterministic spanning tree (sequential DFS)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("query", help="run a query against a built file")
    p.add_argument("--in", required=True)
    p.add_argument("--op", choices=("counting", "listing", "face"), required=True)
    p.add_argument("--arg", type=_positive_int, required=True,
                   help="vertex for counting/listing, tick for face")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("bench", help="time the construction phases")
    p.add_argument("--in", required=True)
    p.add_argument("--threads", type=_thread_list,
                   default=[_default_threads()])
    p.add_argument("--reps", type=_positive_int, default=5)
    p.add_argument("--csv", required=True)
    p.add_argument("--queries", action="store_true",
                   help="also time counting/listing/face calls")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (PgFormatError, ValueError, IndexError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
