#!/usr/bin/env python3
"""Sweep the Fibonacci workload across n and thread counts.

Prints a median wall/CPU table per configuration and optionally keeps the
raw per-iteration CSV. Example:

    python scripts/fib_sweep.py --params 18,20,22,24 --threads 1,2,4 \
        --iterations 5 --out fib_sweep.csv
"""

import argparse
import statistics
import sys

from stealpool.bench import BenchConfig, run_benchmark


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--params", default="16,20,24",
                        help="comma-separated fib parameters")
    parser.add_argument("--threads", default="1,2,4",
                        help="comma-separated thread counts")
    parser.add_argument("--iterations", type=int, default=5)
    parser.add_argument("--warmup", type=int, default=1)
    parser.add_argument("--fib-limit", type=int, default=35)
    parser.add_argument("--out", default=None, help="raw CSV path")
    args = parser.parse_args(argv)

    config = BenchConfig(
        workload="fib",
        params=tuple(int(p) for p in args.params.split(",")),
        threads=tuple(int(t) for t in args.threads.split(",")),
        iterations=args.iterations,
        warmup=args.warmup,
        out_path=args.out,
        fib_limit=args.fib_limit,
    )
    records = run_benchmark(config)

    print(f"{'n':>4} {'threads':>7} {'wall ms (median)':>17} {'cpu ms (median)':>16}")
    for param in config.params:
        for threads in config.threads:
            sel = [r for r in records if r.param == param and r.threads == threads]
            wall = statistics.median(r.wall_ns for r in sel) / 1e6
            cpu = statistics.median(r.cpu_ns for r in sel) / 1e6
            print(f"{param:>4} {threads:>7} {wall:>17.2f} {cpu:>16.2f}")
    if args.out:
        print(f"\nraw records written to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
