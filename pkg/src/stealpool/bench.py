"""Benchmark workloads and the measurement harness.

Three workloads exercise the pool in different ways:

* ``fib``: the classic recursive Fibonacci without memoization. Every
  internal call spawns two child tasks plus a combining task that depends
  on both children, so the whole recursion tree becomes a flood of tiny
  dynamically created tasks. No task ever blocks; joining is expressed
  purely through dependency counts, which keeps a fixed-size pool
  deadlock-free.
* ``expr``: the seven-task graph computing (a + b) * (c + d); four leaf
  loads, two sums, one product.
* ``fanout``: N independent compute-bound tasks. The kernel hashes large
  buffers, which CPython runs outside the interpreter lock, so this is
  the workload that can actually scale across threads in-process.

The harness records wall time and process CPU time per iteration, checks
every result against an independent oracle, and emits CSV.
"""

from __future__ import annotations

import csv
import hashlib
import time
from dataclasses import dataclass
from functools import partial
from typing import Callable

from .executor import ThreadPool
from .task_graph import Task, TaskGraph

WORKLOADS = ("fib", "expr", "fanout")
DEFAULT_FIB_LIMIT = 35
CSV_COLUMNS = ("workload", "param", "threads", "iteration", "wall_ns", "cpu_ns", "checksum")

_FANOUT_BLOCK_WORDS = 8192  # 64 KiB blocks
_FANOUT_ROUNDS = 12


class BenchUsageError(ValueError):
    """The benchmark configuration is unusable."""


class ChecksumMismatchError(RuntimeError):
    """A workload result disagreed with its oracle."""


@dataclass(frozen=True)
class BenchRecord:
    """One timed benchmark measurement."""

    workload: str
    param: int
    threads: int
    iteration: int
    wall_ns: int
    cpu_ns: int
    checksum: int


@dataclass(frozen=True)
class BenchConfig:
    """What to run: workload, parameter sweep, thread counts, repetitions."""

    workload: str
    params: tuple[int, ...]
    threads: tuple[int, ...]
    iterations: int
    warmup: int = 1
    out_path: str | None = None
    operands: tuple[int, int, int] = (2, 3, 4)  # expr's b, c, d
    fib_limit: int = DEFAULT_FIB_LIMIT


# -- oracles ------------------------------------------------------------------


def fib_reference(n: int) -> int:
    """Iterative Fibonacci, fib(0) = 0 and fib(1) = 1."""
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a


def expr_reference(a: int, b: int, c: int, d: int) -> int:
    return (a + b) * (c + d)


def fanout_reference(count: int) -> int:
    acc = 0
    for i in range(count):
        acc ^= _fanout_kernel(i)
    return acc


# -- fib workload -------------------------------------------------------------


def _store(cell: list[int], value: int) -> None:
    cell[0] = value


def _fib_join(left: list[int], right: list[int], out: list[int]) -> None:
    out[0] = left[0] + right[0]


def _fib_expand(pool: ThreadPool, n: int, out: list[int], done: Task) -> None:
    # n >= 2 here. The combiner signals `done` when it has summed both
    # children; each child signals the combiner either directly (leaf) or
    # through its own combiner (recursive case).
    left: list[int] = [0]
    right: list[int] = [0]
    join = Task(partial(_fib_join, left, right, out))
    join.increment_pending(2)
    join.add_successor(done)
    pool.submit_tasks((
        _fib_child(pool, n - 1, left, join),
        _fib_child(pool, n - 2, right, join),
        join,
    ))


def _fib_child(pool: ThreadPool, n: int, out: list[int], done: Task) -> Task:
    if n < 2:
        task = Task(partial(_store, out, n))
        task.add_successor(done)
        return task
    return Task(partial(_fib_expand, pool, n, out, done))


def fib_workload(pool: ThreadPool, n: int, *, limit: int = DEFAULT_FIB_LIMIT) -> int:
    """Compute fib(n) on the pool by spawning the full recursion tree."""
    if n < 0:
        raise BenchUsageError("fib parameter must be non-negative")
    if n > limit:
        raise BenchUsageError(
            f"fib({n}) exceeds the guard of {limit}; raise the limit explicitly to allow it"
        )
    out: list[int] = [0]
    done = Task(_noop)
    done.increment_pending(1)
    pool.submit_tasks((_fib_child(pool, n, out, done), done))
    pool.wait()
    return out[0]


def _noop() -> None:
    pass


# -- expr workload ------------------------------------------------------------


def build_expr_graph(a: int, b: int, c: int, d: int) -> tuple[TaskGraph, list[int]]:
    """The seven-task (a + b) * (c + d) graph; result lands in cell [0]."""
    vals = [0, 0, 0, 0]
    sums = [0, 0]
    product = [0]

    def load(slot: int, value: int) -> Callable[[], None]:
        def work() -> None:
            vals[slot] = value
        return work

    def add(slot: int, left: int, right: int) -> Callable[[], None]:
        def work() -> None:
            sums[slot] = vals[left] + vals[right]
        return work

    def multiply() -> None:
        product[0] = sums[0] * sums[1]

    graph = TaskGraph()
    get_a = graph.add_task(load(0, a), name="get_a")
    get_b = graph.add_task(load(1, b), name="get_b")
    get_c = graph.add_task(load(2, c), name="get_c")
    get_d = graph.add_task(load(3, d), name="get_d")
    sum_ab = graph.add_task(add(0, 0, 1), name="sum_ab")
    sum_cd = graph.add_task(add(1, 2, 3), name="sum_cd")
    prod = graph.add_task(multiply, name="product")
    sum_ab.succeed(get_a, get_b)
    sum_cd.succeed(get_c, get_d)
    prod.succeed(sum_ab, sum_cd)
    return graph, product


def expr_workload(pool: ThreadPool, a: int, b: int, c: int, d: int) -> int:
    graph, product = build_expr_graph(a, b, c, d)
    pool.submit_graph(graph)
    pool.wait()
    return product[0]


# -- fanout workload ----------------------------------------------------------


def _fanout_kernel(index: int) -> int:
    # Hashing dominates and runs outside the interpreter lock, so parallel
    # workers genuinely overlap on multi-core hosts.
    block = index.to_bytes(8, "little") * _FANOUT_BLOCK_WORDS
    digest = b""
    for _ in range(_FANOUT_ROUNDS):
        digest = hashlib.sha256(block + digest).digest()
    return int.from_bytes(digest[:8], "little")


def fanout_workload(pool: ThreadPool, count: int) -> int:
    """Run ``count`` independent kernels and fold their results."""
    if count < 0:
        raise BenchUsageError("fanout parameter must be non-negative")
    results = [0] * count
    for i in range(count):
        pool.submit(partial(_run_fanout_task, results, i))
    pool.wait()
    acc = 0
    for r in results:
        acc ^= r
    return acc


def _run_fanout_task(results: list[int], index: int) -> None:
    results[index] = _fanout_kernel(index)


# -- harness ------------------------------------------------------------------


def _runner_for(config: BenchConfig) -> Callable[[ThreadPool, int], int]:
    if config.workload == "fib":
        return lambda pool, p: fib_workload(pool, p, limit=config.fib_limit)
    if config.workload == "expr":
        b, c, d = config.operands
        return lambda pool, p: expr_workload(pool, p, b, c, d)
    return fanout_workload


def _oracle_for(config: BenchConfig) -> Callable[[int], int]:
    if config.workload == "fib":
        return fib_reference
    if config.workload == "expr":
        b, c, d = config.operands
        return lambda p: expr_reference(p, b, c, d)
    return fanout_reference


def _validate(config: BenchConfig) -> None:
    if config.workload not in WORKLOADS:
        raise BenchUsageError(f"unknown workload {config.workload!r}; pick one of {WORKLOADS}")
    if not config.params:
        raise BenchUsageError("parameter list is empty")
    if not config.threads:
        raise BenchUsageError("thread list is empty")
    if any(t < 1 for t in config.threads):
        raise BenchUsageError("thread counts must be >= 1")
    if config.iterations < 1:
        raise BenchUsageError("iterations must be >= 1")
    if config.warmup < 0:
        raise BenchUsageError("warmup must be >= 0")
    if config.workload == "fib":
        for p in config.params:
            if p < 0 or p > config.fib_limit:
                raise BenchUsageError(
                    f"fib parameter {p} outside [0, {config.fib_limit}]"
                )


def run_benchmark(config: BenchConfig) -> list[BenchRecord]:
    """Run the configured sweep, verify checksums, and emit CSV if asked.

    One pool is created per thread count and torn down after its share of
    the iterations. Warmup runs are verified but not recorded.
    """
    _validate(config)
    runner = _runner_for(config)
    oracle = _oracle_for(config)

    writer = None
    out_file = None
    if config.out_path is not None:
        try:
            out_file = open(config.out_path, "w", newline="")
        except OSError as exc:
            raise BenchUsageError(f"cannot write {config.out_path}: {exc}") from exc
        writer = csv.writer(out_file)
        writer.writerow(CSV_COLUMNS)

    records: list[BenchRecord] = []
    try:
        for threads in config.threads:
            with ThreadPool(threads) as pool:
                for param in config.params:
                    expected = oracle(param)
                    for _ in range(config.warmup):
                        _checked_run(runner, pool, param, expected, config.workload)
                    for iteration in range(config.iterations):
                        cpu0 = time.process_time_ns()
                        wall0 = time.perf_counter_ns()
                        value = runner(pool, param)
                        wall_ns = time.perf_counter_ns() - wall0
                        cpu_ns = time.process_time_ns() - cpu0
                        if value != expected:
                            raise ChecksumMismatchError(
                                f"{config.workload}({param}) returned {value}, expected {expected}"
                            )
                        record = BenchRecord(
                            workload=config.workload,
                            param=param,
                            threads=threads,
                            iteration=iteration,
                            wall_ns=wall_ns,
                            cpu_ns=cpu_ns,
                            checksum=value,
                        )
                        records.append(record)
                        if writer is not None:
                            writer.writerow(
                                (record.workload, record.param, record.threads,
                                 record.iteration, record.wall_ns, record.cpu_ns,
                                 record.checksum)
                            )
    finally:
        if out_file is not None:
            out_file.close()
    return records


def _checked_run(
    runner: Callable[[ThreadPool, int], int],
    pool: ThreadPool,
    param: int,
    expected: int,
    workload: str,
) -> None:
    value = runner(pool, param)
    if value != expected:
        raise ChecksumMismatchError(
            f"{workload}({param}) returned {value}, expected {expected} (warmup)"
        )
