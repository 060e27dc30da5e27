#!/usr/bin/env python3
"""Compare the compiled kernel extension against the pure-Python twin.

The pure run happens in a subprocess with SPARSEQ_PURE=1 so both builds
of the same kernel source can be timed in one invocation::

    python3 benchmarks/bench_kernels.py [--side 256] [--density 0.01] [--repeat 3]
"""

from __future__ import annotations

import argparse
import json
import os
import random
import subprocess
import sys
import time


def run_suite(side: int, density: float, repeat: int) -> dict:
    from sparseq import k2algebra as A
    from sparseq import kernels
    from sparseq.k2matrix import K2Matrix

    rng = random.Random(7)
    count = max(1, int(side * side * density))
    a = K2Matrix.build(
        set((rng.randrange(side), rng.randrange(side)) for _ in range(count)), side
    )
    b = K2Matrix.build(
        set((rng.randrange(side), rng.randrange(side)) for _ in range(count)), side
    )

    def best(fn):
        times = []
        for _ in range(repeat):
            t0 = time.perf_counter()
            fn()
            times.append(time.perf_counter() - t0)
        return min(times) * 1e3

    return {
        "compiled": kernels.COMPILED,
        "side": side,
        "ones": a.ones,
        "add_ms": best(lambda: A.add(a, b)),
        "add_mixed_ms": best(lambda: A.add(a, b.transpose())),
        "multiply_ms": best(lambda: A.multiply(a, b)),
        "closure_ms": best(lambda: A.closure_plus(a)),
        "enumerate_ms": best(lambda: sum(1 for _ in a.enumerate_ones())),
    }


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--side", type=int, default=256)
    parser.add_argument("--density", type=float, default=0.01)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--emit-json", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()

    if args.emit_json:
        print(json.dumps(run_suite(args.side, args.density, args.repeat)))
        return 0

    here = run_suite(args.side, args.density, args.repeat)
    env = dict(os.environ, SPARSEQ_PURE="1")
    out = subprocess.run(
        [sys.executable, os.path.abspath(__file__), "--emit-json", "--side", str(args.side),
         "--density", str(args.density), "--repeat", str(args.repeat)],
        env=env, capture_output=True, text=True, check=True,
    )
    pure = json.loads(out.stdout)

    if not here["compiled"]:
        print("warning: compiled extension unavailable; comparing pure against pure")
    print("side=%d ones=%d repeat=%d (best of)" % (here["side"], here["ones"], args.repeat))
    print("%-16s %12s %12s %8s" % ("kernel", "compiled ms", "pure ms", "speedup"))
    for key in ("add_ms", "add_mixed_ms", "multiply_ms", "closure_ms", "enumerate_ms"):
        name = key[:-3]
        ratio = pure[key] / here[key] if here[key] else float("inf")
        print("%-16s %12.2f %12.2f %7.1fx" % (name, here[key], pure[key], ratio))
    return 0


if __name__ == "__main__":
    sys.exit(main())
