"""Command-line front end: build indexes, run queries, print stats,
benchmark query suites.

Exit codes for ``query``: 2 = syntax error in the query, 3 = timeout,
4 = unknown label or node constant.
"""

from __future__ import annotations

import argparse
import csv
import os
import statistics
import sys
import time

from sparseq import graphstore, planner, rpqlang

DEFAULT_TIMEOUT = 60.0

EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_TIMEOUT = 3
EXIT_UNKNOWN = 4


def _default_timeout() -> float:
    env = os.environ.get("SPARSEQ_TIMEOUT")
    if env:
        try:
            return float(env)
        except ValueError:
            print("warning: ignoring bad SPARSEQ_TIMEOUT=%r" % env, file=sys.stderr)
    return DEFAULT_TIMEOUT


def cmd_build(args) -> int:
    start = time.perf_counter()
    try:
        store = graphstore.load_triples(args.input, args.backend)
    except (OSError, graphstore.TripleFormatError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    graphstore.save_index(store, args.index)
    elapsed = time.perf_counter() - start
    report = graphstore.stats(store)
    print("built %s index: %d triples, %d nodes, %d labels" % (
        store.backend, store.n, len(store.nodes), len(store.labels)))
    print("build_seconds=%.3f" % elapsed)
    print("bytes_per_triple=%.2f" % report["bytes_per_triple"])
    return 0


def _bindings(result, store, emit_identity: bool):
    """Yield (subject id, object id) pairs from a result matrix; the
    lazy identity diagonal is clamped to real node ids and only emitted
    on request (a top-level star adds all |V| of them)."""
    limit = len(store.nodes)
    if result.plus_identity and not emit_identity:
        result = result.without_identity()
    for r, c in result.enumerate_ones(identity_limit=limit):
        yield r, c


def _run_query(store, text: str, timeout: float):
    query = rpqlang.parse(text)
    plan = planner.compile_query(query, store)
    return planner.evaluate(plan, store, timeout=timeout)


def cmd_query(args) -> int:
    try:
        store = graphstore.load_index(args.index)
    except (OSError, graphstore.IndexFormatError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    try:
        result = _run_query(store, args.rpq, args.timeout)
    except rpqlang.RpqSyntaxError as exc:
        print("parse error: %s" % exc, file=sys.stderr)
        return EXIT_PARSE
    except planner.QueryTimeout:
        print("timeout after %.1f s" % args.timeout, file=sys.stderr)
        return EXIT_TIMEOUT
    except planner.PlanError as exc:
        # distinct from an empty result, which exits 0 with no rows
        print("error: %s (no such name in the index)" % exc, file=sys.stderr)
        return EXIT_UNKNOWN
    pairs = _bindings(result, store, args.emit_identity)
    if args.format == "count":
        print(sum(1 for _ in pairs))
        return 0
    if args.sort:
        pairs = sorted(pairs)
    out = sys.stdout
    for r, c in pairs:
        out.write("%s\t%s\n" % (store.nodes.name(r), store.nodes.name(c)))
    return 0


def cmd_stats(args) -> int:
    try:
        store = graphstore.load_index(args.index)
    except (OSError, graphstore.IndexFormatError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    for key, value in graphstore.stats(store).items():
        if isinstance(value, float):
            print("%s=%.3f" % (key, value))
        else:
            print("%s=%s" % (key, value))
    return 0


def cmd_bench(args) -> int:
    try:
        store = graphstore.load_index(args.index)
        with open(args.queries, "r", encoding="utf-8") as fh:
            queries = [line.strip() for line in fh if line.strip() and not line.startswith("#")]
    except (OSError, graphstore.IndexFormatError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE
    writer = csv.writer(sys.stdout)
    writer.writerow(["query", "status", "count", "ms"])
    ok_ms = []
    timeouts = 0
    for text in queries:
        start = time.perf_counter()
        status, count = "ok", 0
        try:
            result = _run_query(store, text, args.timeout)
            count = sum(1 for _ in _bindings(result, store, args.emit_identity))
        except planner.QueryTimeout:
            status = "timeout"
        except (rpqlang.RpqSyntaxError, planner.PlanError) as exc:
            status = "error: %s" % exc
        # round to what the row shows so the footer is recomputable from it
        ms = round((time.perf_counter() - start) * 1000.0, 2)
        if status == "ok":
            ok_ms.append(ms)
        elif status == "timeout":
            timeouts += 1
        writer.writerow([text, status, count, "%.2f" % ms])
    avg = statistics.mean(ok_ms) if ok_ms else 0.0
    med = statistics.median(ok_ms) if ok_ms else 0.0
    print("# average_ms=%.2f median_ms=%.2f timeouts=%d queries=%d"
          % (avg, med, timeouts, len(queries)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sparseq", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build an index from a triple file")
    p.add_argument("--input", required=True, help="TAB-separated triple file")
    p.add_argument("--index", required=True, help="output index path")
    p.add_argument("--backend", choices=sorted(graphstore.BACKENDS), default="k2")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("query", help="evaluate one path query")
    p.add_argument("--index", required=True)
    p.add_argument("--rpq", required=True, help="query text: subject expr object")
    p.add_argument("--timeout", type=float, default=None, help="seconds (default 60)")
    p.add_argument("--format", choices=["tsv", "count"], default="tsv")
    p.add_argument("--sort", action="store_true", help="sort bindings lexicographically by id")
    p.add_argument("--emit-identity", action="store_true",
                   help="include the |V| diagonal pairs a top-level star implies")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("stats", help="print index statistics as key=value lines")
    p.add_argument("--index", required=True)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("bench", help="time a file of queries, one per line")
    p.add_argument("--index", required=True)
    p.add_argument("--queries", required=True)
    p.add_argument("--timeout", type=float, default=None)
    p.add_argument("--emit-identity", action="store_true")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "timeout", None) is None and args.command in ("query", "bench"):
        args.timeout = _default_timeout()
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
