"""Correctness harness: random DAGs, ordering oracles, and stress drivers.

Everything here is deliberately simple and single-minded so it can serve
as an independent reference for the scheduler and the deque: the DAG
generator is acyclic by construction, the sequential executor is plain
Kahn peeling, and the stress driver checks conservation by comparing raw
consumption logs against what was pushed.
"""

from __future__ import annotations

import collections
import random
import threading
import time
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .atomics import AtomicInt
from .deque import EMPTY, RETRY, WorkStealingDeque
from .executor import ThreadPool
from .task_graph import TaskGraph


class IncompleteLogError(ValueError):
    """An order log is missing entries or has duplicates."""


@dataclass(frozen=True)
class DagSpec:
    """A concrete random DAG: edges only ever point forward, so it is
    acyclic by construction."""

    node_count: int
    edges: tuple[tuple[int, int], ...]
    seed: int

    def __post_init__(self) -> None:
        if self.node_count < 1:
            raise ValueError("node_count must be >= 1")
        for p, s in self.edges:
            if not (0 <= p < s < self.node_count):
                raise ValueError(f"edge ({p}, {s}) is not a forward edge in range")

    def predecessor_lists(self) -> list[list[int]]:
        preds: list[list[int]] = [[] for _ in range(self.node_count)]
        for p, s in self.edges:
            preds[s].append(p)
        return preds


class OrderLog:
    """Completion log of (node index, tick); safe to record from workers.

    Ticks come from one shared counter bumped at completion time, so they
    give a total order that never ties, unlike wall-clock stamps.
    """

    __slots__ = ("_entries", "_ticker")

    def __init__(self) -> None:
        self._entries: list[tuple[int, int]] = []
        self._ticker = AtomicInt()

    def record(self, index: int) -> None:
        self._entries.append((index, self._ticker.add(1)))

    def __len__(self) -> int:
        return len(self._entries)

    @property
    def entries(self) -> tuple[tuple[int, int], ...]:
        return tuple(self._entries)

    def ticks_by_node(self, node_count: int) -> list[int]:
        """Tick per node; raises IncompleteLogError unless exactly one each."""
        ticks = [-1] * node_count
        for index, tick in self._entries:
            if not 0 <= index < node_count:
                raise IncompleteLogError(f"entry for out-of-range node {index}")
            if ticks[index] != -1:
                raise IncompleteLogError(f"duplicate entry for node {index}")
            ticks[index] = tick
        if len(self._entries) != node_count:
            raise IncompleteLogError(
                f"log has {len(self._entries)} entries for {node_count} nodes"
            )
        return ticks


def random_dag(node_count: int, edge_probability: float, seed: int) -> DagSpec:
    """Each forward pair (i, j), i < j, becomes an edge with the given
    probability. Deterministic for a given seed."""
    if node_count < 1:
        raise ValueError("node_count must be >= 1")
    if not 0.0 <= edge_probability <= 1.0:
        raise ValueError("edge_probability must be within [0, 1]")
    rng = random.Random(seed)
    edges = [
        (i, j)
        for i in range(node_count)
        for j in range(i + 1, node_count)
        if rng.random() < edge_probability
    ]
    return DagSpec(node_count=node_count, edges=tuple(edges), seed=seed)


def check_topological(log: OrderLog, spec: DagSpec) -> Optional[tuple[int, int]]:
    """None if every edge's predecessor completed first, else one bad edge."""
    ticks = log.ticks_by_node(spec.node_count)
    for p, s in spec.edges:
        if ticks[p] > ticks[s]:
            return (p, s)
    return None


def sequential_execute(spec: DagSpec, works: Sequence[Callable[[], None]] | None = None) -> OrderLog:
    """Run the DAG single-threaded in Kahn order and return its log.

    ``works``, when given, holds one callable per node and is invoked in
    the same order, making this the reference run for state-equivalence
    checks against the pool.
    """
    indegree = [0] * spec.node_count
    succs: list[list[int]] = [[] for _ in range(spec.node_count)]
    for p, s in spec.edges:
        indegree[s] += 1
        succs[p].append(s)
    queue = collections.deque(i for i, d in enumerate(indegree) if d == 0)
    log = OrderLog()
    done = 0
    while queue:
        node = queue.popleft()
        if works is not None:
            works[node]()
        log.record(node)
        done += 1
        for s in succs[node]:
            indegree[s] -= 1
            if indegree[s] == 0:
                queue.append(s)
    if done != spec.node_count:
        raise ValueError("spec was not acyclic; cannot happen for forward-edge specs")
    return log


def graph_from_dag_spec(spec: DagSpec, make_work: Callable[[int], Callable[[], None]]) -> TaskGraph:
    """Materialize a DagSpec as a TaskGraph with make_work(i) per node."""
    graph = TaskGraph()
    tasks = [graph.add_task(make_work(i)) for i in range(spec.node_count)]
    for p, s in spec.edges:
        tasks[s].succeed(tasks[p])
    return graph


# -- deque stress -----------------------------------------------------------


@dataclass(frozen=True)
class StressReport:
    """Consumption logs and invariant violations from one stress run."""

    item_count: int
    thief_count: int
    owner_pops: int
    seed: int
    owner_popped: tuple[int, ...]
    stolen: tuple[tuple[int, ...], ...]
    retries: int
    buffer_growths: int
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def consumed_total(self) -> int:
        return len(self.owner_popped) + sum(len(s) for s in self.stolen)


def deque_stress(owner_pops: int, thief_count: int, item_count: int, seed: int) -> StressReport:
    """One owner pushes ``item_count`` distinct items, attempting
    ``owner_pops`` pops at seeded positions, while ``thief_count`` thieves
    steal until everything is consumed. Violations are reported, not raised.
    """
    if thief_count < 1:
        raise ValueError("thief_count must be >= 1")
    if not 0 <= owner_pops:
        raise ValueError("owner_pops must be >= 0")

    dq = WorkStealingDeque()
    rng = random.Random(seed)
    pop_at = set(rng.sample(range(item_count), min(owner_pops, item_count)))
    owner_done = threading.Event()
    owner_popped: list[int] = []
    stolen: list[list[int]] = [[] for _ in range(thief_count)]
    retries = AtomicInt()

    def owner() -> None:
        for i in range(item_count):
            dq.push(i)
            if i in pop_at:
                got = dq.pop()
                if got is not None:
                    owner_popped.append(got)
        owner_done.set()

    def thief(log: list[int]) -> None:
        misses = 0
        while True:
            finished = owner_done.is_set()  # must be sampled before the steal
            got = dq.steal()
            if got is RETRY:
                retries.add(1)
                continue
            if got is EMPTY:
                if finished:
                    return
                misses += 1
                if misses & 0x3F == 0:
                    time.sleep(0)  # let the owner make progress
                continue
            log.append(got)

    threads = [threading.Thread(target=thief, args=(log,), daemon=True) for log in stolen]
    threads.append(threading.Thread(target=owner, daemon=True))
    for t in threads:
        t.start()
    for t in threads:
        t.join()

    violations: list[str] = []
    consumed = sorted(owner_popped)
    for log in stolen:
        consumed.extend(log)
    consumed.sort()
    if consumed != list(range(item_count)):
        missing = item_count - len(set(consumed))
        dupes = len(consumed) - len(set(consumed))
        violations.append(f"conservation broken: {missing} missing, {dupes} duplicated")
    for k, log in enumerate(stolen):
        if any(a >= b for a, b in zip(log, log[1:])):
            violations.append(f"thief {k} consumed out of push order")
    if len(dq):
        violations.append(f"{len(dq)} items left unconsumed")

    return StressReport(
        item_count=item_count,
        thief_count=thief_count,
        owner_pops=owner_pops,
        seed=seed,
        owner_popped=tuple(owner_popped),
        stolen=tuple(tuple(log) for log in stolen),
        retries=retries.load(),
        buffer_growths=dq.growth_count,
        violations=tuple(violations),
    )


# -- pooled DAG campaign ------------------------------------------------------


@dataclass(frozen=True)
class DagRunResult:
    seed: int
    node_count: int
    edge_count: int
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def run_dag_on_pool(pool: ThreadPool, spec: DagSpec) -> DagRunResult:
    """Execute one DAG on the pool and compare against the sequential oracle.

    Each node computes ``value[i] = i + sum(value[predecessors])``, which is
    invariant under the choice of topological order, so pool state must
    match the oracle's exactly. The completion log is also checked against
    every edge.
    """
    preds = spec.predecessor_lists()

    pool_vals = [0] * spec.node_count
    pool_log = OrderLog()

    def make_pool_work(i: int) -> Callable[[], None]:
        def work() -> None:
            pool_vals[i] = i + sum(pool_vals[p] for p in preds[i])
            pool_log.record(i)
        return work

    seq_vals = [0] * spec.node_count

    def make_seq_work(i: int) -> Callable[[], None]:
        def work() -> None:
            seq_vals[i] = i + sum(seq_vals[p] for p in preds[i])
        return work

    graph = graph_from_dag_spec(spec, make_pool_work)
    pool.submit_graph(graph)
    pool.wait()
    sequential_execute(spec, [make_seq_work(i) for i in range(spec.node_count)])

    violations: list[str] = []
    bad_edge = check_topological(pool_log, spec)
    if bad_edge is not None:
        violations.append(f"edge {bad_edge} completed out of order")
    if pool_vals != seq_vals:
        violations.append("pool state diverged from sequential state")
    return DagRunResult(
        seed=spec.seed,
        node_count=spec.node_count,
        edge_count=len(spec.edges),
        violations=tuple(violations),
    )


def dag_campaign(
    count: int,
    max_nodes: int,
    edge_probability: float,
    threads: int,
    seed0: int = 0,
) -> list[DagRunResult]:
    """Run ``count`` seeded random DAGs on one pool; node counts vary with
    the seed up to ``max_nodes``."""
    results: list[DagRunResult] = []
    with ThreadPool(threads) as pool:
        for k in range(count):
            seed = seed0 + k
            node_count = random.Random(seed).randint(1, max_nodes)
            spec = random_dag(node_count, edge_probability, seed)
            results.append(run_dag_on_pool(pool, spec))
    return results
