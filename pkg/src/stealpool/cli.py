"""Command-line entry points: `stealpool bench` and `stealpool verify`.

Exit codes: 0 on success, 1 when a checksum or invariant check fails,
2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import statistics
import sys
from typing import Sequence

from .bench import BenchConfig, BenchUsageError, ChecksumMismatchError, run_benchmark
from .verify import dag_campaign, deque_stress


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip() != ""]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stealpool")
    sub = parser.add_subparsers(dest="command", required=True)

    bench = sub.add_parser("bench", help="run a timed workload sweep and emit CSV")
    bench.add_argument("--workload", required=True, choices=("fib", "expr", "fanout"))
    bench.add_argument("--param", type=_int_list, default=[1],
                       help="workload parameter(s), comma separated (fib n, expr a, fanout task count)")
    bench.add_argument("--param2", type=int, default=2, help="expr operand b")
    bench.add_argument("--param3", type=int, default=3, help="expr operand c")
    bench.add_argument("--param4", type=int, default=4, help="expr operand d")
    bench.add_argument("--threads", type=_int_list, default=[1], help="thread counts, comma separated")
    bench.add_argument("--iterations", type=int, default=3)
    bench.add_argument("--warmup", type=int, default=1)
    bench.add_argument("--out", default=None, help="CSV output path")
    bench.add_argument("--fib-limit", type=int, default=35,
                       help="guard against accidentally huge fib parameters")

    verify = sub.add_parser("verify", help="run correctness stress campaigns")
    verify.add_argument("--scenario", required=True, choices=("deque", "dag"))
    verify.add_argument("--items", type=int, default=100_000, help="deque: items per run")
    verify.add_argument("--thieves", type=int, default=2, help="deque: stealing threads")
    verify.add_argument("--owner-pops", type=int, default=0, help="deque: owner pop attempts")
    verify.add_argument("--seeds", type=_int_list, default=[1], help="deque: one run per seed")
    verify.add_argument("--dags", type=int, default=100, help="dag: number of random graphs")
    verify.add_argument("--max-nodes", type=int, default=64)
    verify.add_argument("--edge-prob", type=float, default=0.15)
    verify.add_argument("--threads", type=int, default=4, help="dag: pool width")
    verify.add_argument("--seed", type=int, default=0, help="dag: first seed of the range")
    verify.add_argument("--out", default=None, help="CSV output path")
    return parser


def _cmd_bench(args: argparse.Namespace) -> int:
    config = BenchConfig(
        workload=args.workload,
        params=tuple(args.param),
        threads=tuple(args.threads),
        iterations=args.iterations,
        warmup=args.warmup,
        out_path=args.out,
        operands=(args.param2, args.param3, args.param4),
        fib_limit=args.fib_limit,
    )
    try:
        records = run_benchmark(config)
    except BenchUsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ChecksumMismatchError as exc:
        print(f"checksum mismatch: {exc}", file=sys.stderr)
        return 1

    for threads in config.threads:
        for param in config.params:
            walls = [r.wall_ns for r in records if r.threads == threads and r.param == param]
            median_ms = statistics.median(walls) / 1e6
            print(f"{config.workload} param={param} threads={threads} "
                  f"median_wall={median_ms:.3f}ms over {len(walls)} iterations")
    if config.out_path:
        print(f"wrote {len(records)} records to {config.out_path}")
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    rows: list[tuple] = []
    failures = 0
    if args.scenario == "deque":
        for seed in args.seeds:
            report = deque_stress(args.owner_pops, args.thieves, args.items, seed)
            status = "ok" if report.ok else "FAIL " + "; ".join(report.violations)
            print(f"deque seed={seed} items={args.items} thieves={args.thieves} "
                  f"consumed={report.consumed_total} retries={report.retries} -> {status}")
            rows.append(("deque", seed, args.items, report.consumed_total,
                         report.retries, int(report.ok)))
            failures += 0 if report.ok else 1
    else:
        results = dag_campaign(args.dags, args.max_nodes, args.edge_prob,
                               args.threads, args.seed)
        for res in results:
            if not res.ok:
                print(f"dag seed={res.seed} nodes={res.node_count} -> FAIL "
                      + "; ".join(res.violations))
            rows.append(("dag", res.seed, res.node_count, res.edge_count, 0, int(res.ok)))
        failures = sum(1 for r in results if not r.ok)
        print(f"dag campaign: {len(results)} graphs, {failures} failures")

    if args.out:
        try:
            with open(args.out, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(("scenario", "seed", "size", "detail", "retries", "ok"))
                writer.writerows(rows)
        except OSError as exc:
            print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
            return 2
    return 1 if failures else 0


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "bench":
        return _cmd_bench(args)
    return _cmd_verify(args)


if __name__ == "__main__":
    sys.exit(main())
