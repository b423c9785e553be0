"""Work-stealing thread pool with task-graph completion propagation.

Each worker owns one work-stealing deque and finds it again through a
pool-private thread-local slot, so a task submitted from a worker thread
lands on that worker's own deque with no locking. Threads that own no
deque (anything outside the pool) submit through a shared multi-producer
injector queue instead, which keeps the single-owner push/pop contract of
the deques intact.

An idle worker scans: its own deque, then the injector, then the other
workers' deques in a rotating sweep starting at a random victim. After a
bounded number of fruitless sweeps with growing pauses it parks on a
condition variable; every submission wakes one parked worker.

When a task finishes, each of its successors loses one pending
predecessor. The first successor observed to become ready is executed
directly on the same worker (no queue round-trip); any further ready
successors are pushed like fresh submissions.
"""

from __future__ import annotations

import collections
import os
import random
import threading
import time
from dataclasses import dataclass
from typing import Callable, Iterable

from .atomics import AtomicInt
from .deque import EMPTY, RETRY, WorkStealingDeque
from .task_graph import Task, TaskGraph

#: Fruitless scan sweeps an idle worker performs before parking.
SPIN_SWEEPS = 128
#: Sweeps granted after a park timeout before parking again.
_REWAKE_SWEEPS = 4
#: Backstop park timeout; normal wakeups come from submission notifies, so
#: this only bounds recovery from a missed wake. Timed waits cost real CPU
#: per wake on some hosts, which argues for a long period.
_PARK_TIMEOUT = 2.0
#: Consecutive RETRY results tolerated per victim before moving on.
_RETRY_LIMIT = 4


class PoolShutDownError(RuntimeError):
    """A submission arrived after the pool began shutting down."""


@dataclass(frozen=True)
class PoolStats:
    """Scheduling counters, exact once the pool is quiescent."""

    executed_per_worker: tuple[int, ...]
    stolen_per_worker: tuple[int, ...]
    injector_takes_per_worker: tuple[int, ...]
    local_submits_per_worker: tuple[int, ...]
    inline_continuations: int
    requeued_continuations: int
    injector_submits: int

    @property
    def executed_total(self) -> int:
        return sum(self.executed_per_worker)

    @property
    def stolen_total(self) -> int:
        return sum(self.stolen_per_worker)


class ThreadPool:
    """Fixed set of worker threads executing tasks and task graphs.

    ``threads`` of None or 0 selects the detected hardware concurrency.
    All public methods are safe to call from any thread. User callables
    run on arbitrary workers and must not block on the pool's own
    completion (no ``wait()`` from inside a task).
    """

    _pool_seq = AtomicInt()

    def __init__(self, threads: int | None = None, *, spin_sweeps: int = SPIN_SWEEPS) -> None:
        if threads is None or threads == 0:
            threads = os.cpu_count() or 1
        if threads < 0:
            raise ValueError("thread count must be >= 1 (or 0/None for the default)")
        self._n = threads
        self._spin_sweeps = spin_sweeps
        self._deques = [WorkStealingDeque() for _ in range(threads)]
        self._injector: collections.deque[Task] = collections.deque()
        self._tls = threading.local()
        self._idle = threading.Condition()
        self._parked = 0
        self._stop = False     # workers exit once set and pending work drained
        self._closing = False  # external submissions rejected once set
        self._lifecycle = threading.Lock()
        self._first_error: BaseException | None = None
        self._error_lock = threading.Lock()

        # Work accounting. Submission counts are bumped before a task can
        # possibly run, completion counts after it fully finished; both only
        # ever grow, and each worker writes only its own slot, so summing
        # them needs no lock (see _quiescent for the ordering argument).
        self._submitted_by_worker = [0] * threads
        self._submitted_external = AtomicInt()
        self._completed = [0] * threads

        # Scheduling counters, each written only by its own worker.
        self._executed = [0] * threads
        self._stolen = [0] * threads
        self._injector_takes = [0] * threads
        self._local_submits = [0] * threads
        self._inline = [0] * threads
        self._requeued = [0] * threads
        self._injector_submits = AtomicInt()

        pool_id = ThreadPool._pool_seq.add(1)
        self._threads: list[threading.Thread] = []
        try:
            for i in range(threads):
                t = threading.Thread(
                    target=self._worker_loop,
                    args=(i,),
                    name=f"stealpool-{pool_id}-w{i}",
                    daemon=True,
                )
                t.start()
                self._threads.append(t)
        except BaseException:
            self._stop = True
            with self._idle:
                self._idle.notify_all()
            for t in self._threads:
                t.join()
            raise

    # -- lifecycle ---------------------------------------------------------

    def __enter__(self) -> "ThreadPool":
        return self

    def __exit__(self, *exc_info: object) -> None:
        self.shutdown()

    @property
    def worker_count(self) -> int:
        return self._n

    @property
    def parked_workers(self) -> int:
        return self._parked

    @property
    def first_error(self) -> BaseException | None:
        """First exception that escaped a task, if any (sticky)."""
        return self._first_error

    def shutdown(self) -> None:
        """Drain pending work, stop the workers, and join them.

        Safe to call from any thread and more than once. New external
        submissions are rejected as soon as shutdown begins; tasks already
        running may keep submitting while the drain completes.
        """
        with self._lifecycle:
            self._closing = True
        self._drain()
        self._stop = True
        with self._idle:
            self._idle.notify_all()
        for t in self._threads:
            t.join()

    # -- submission --------------------------------------------------------

    def submit(self, work: Callable[[], None]) -> None:
        """Schedule a free-standing callable to run once."""
        self.submit_tasks((Task(work),))

    def submit_tasks(self, tasks: Iterable[Task]) -> None:
        """Account and schedule a pre-wired family of tasks.

        Every task is counted as pending work immediately. Only tasks
        wired with zero predecessors are enqueued here; every other task
        is scheduled by completion propagation alone. (Deciding by the
        *current* pending count instead would double-schedule a task whose
        predecessors finish while this loop is still running.)
        """
        batch = tuple(tasks)
        self._check_open()
        self._account(len(batch))
        for task in batch:
            if task.initial_predecessors == 0:
                self._enqueue(task)

    def submit_graph(self, graph: TaskGraph) -> None:
        """Validate and schedule a whole task graph.

        Rejects cyclic graphs before any task runs. An empty graph is a
        no-op that completes immediately. The graph may not be rewired or
        resubmitted until ``graph.reset()``.
        """
        self._check_open()
        graph.validate()
        graph._freeze_for_run()
        self.submit_tasks(graph)

    def wait(self) -> None:
        """Block until no submitted work remains, including nested submissions.

        If any task raised, the first recorded exception is re-raised here
        (and stays available as ``first_error``).
        """
        self._drain()
        err = self._first_error
        if err is not None:
            raise err

    # -- introspection -----------------------------------------------------

    def stats(self) -> PoolStats:
        return PoolStats(
            executed_per_worker=tuple(self._executed),
            stolen_per_worker=tuple(self._stolen),
            injector_takes_per_worker=tuple(self._injector_takes),
            local_submits_per_worker=tuple(self._local_submits),
            inline_continuations=sum(self._inline),
            requeued_continuations=sum(self._requeued),
            injector_submits=self._injector_submits.load(),
        )

    def queue_depths(self) -> tuple[int, tuple[int, ...]]:
        """(injector length, per-worker deque lengths); exact when quiescent."""
        return len(self._injector), tuple(len(d) for d in self._deques)

    @property
    def pending_count(self) -> int:
        """Submitted-but-unfinished task count; approximate while running."""
        submitted = self._submitted_external.load() + sum(self._submitted_by_worker)
        return max(0, submitted - sum(self._completed))

    # -- internals ---------------------------------------------------------

    def _account(self, n: int) -> None:
        if n == 0:
            return
        slot = getattr(self._tls, "slot", None)
        if slot is not None:
            self._submitted_by_worker[slot] += n
        else:
            self._submitted_external.add(n)

    def _quiescent(self) -> bool:
        # Read completions before submissions. Both sums only grow, so if
        # they come out equal, completed(t) == submitted(t) held at the
        # moment t between the two phases, and at that moment no task was
        # queued or running.
        completed = sum(self._completed)
        submitted = self._submitted_external.load() + sum(self._submitted_by_worker)
        return completed == submitted

    def _drain(self) -> None:
        pause = 0.0
        while not self._quiescent():
            time.sleep(pause)
            pause = min(0.0005, pause * 2 + 0.00001)

    def _check_open(self) -> None:
        if self._stop:
            raise PoolShutDownError("pool is shut down")
        if self._closing and getattr(self._tls, "slot", None) is None:
            raise PoolShutDownError("pool is shutting down")

    def _enqueue(self, task: Task) -> None:
        slot = getattr(self._tls, "slot", None)
        if slot is not None:
            self._deques[slot].push(task)
            self._local_submits[slot] += 1
        else:
            self._injector.append(task)
            self._injector_submits.add(1)
        if self._parked:
            with self._idle:
                self._idle.notify()

    def _record_error(self, exc: BaseException) -> None:
        with self._error_lock:
            if self._first_error is None:
                self._first_error = exc

    def _worker_loop(self, index: int) -> None:
        self._tls.slot = index
        own = self._deques[index]
        rng = random.Random()
        sweeps = 0
        while True:
            task = own.pop()
            if task is None:
                task = self._poach(index, rng)
            if task is not None:
                sweeps = 0
                self._run_chain(index, task)
                continue
            if self._stop and self._quiescent():
                break
            sweeps += 1
            if sweeps <= self._spin_sweeps:
                self._spin_pause(sweeps)
                continue
            with self._idle:
                # Register as parked *before* the final work check: a
                # submitter reads _parked after enqueueing, so it either
                # sees us here and notifies, or we see its work below.
                self._parked += 1
                try:
                    if self._stop and self._quiescent():
                        break
                    if self._work_visible():
                        sweeps = 0
                        continue
                    self._idle.wait(_PARK_TIMEOUT)
                finally:
                    self._parked -= 1
            sweeps = self._spin_sweeps - _REWAKE_SWEEPS

    def _run_chain(self, index: int, task: Task) -> None:
        # Inline continuations run iteratively, not recursively, so a long
        # dependency chain cannot overflow the interpreter stack.
        executed = self._executed
        completed = self._completed
        while task is not None:
            try:
                task.work()
            except BaseException as exc:
                # A worker that dies would strand pending work and deadlock
                # wait(); record the failure and keep the graph moving.
                self._record_error(exc)
            executed[index] += 1
            nxt = None
            for succ in task._successors:
                if succ._finish_one_predecessor():
                    if nxt is None:
                        nxt = succ
                    else:
                        self._enqueue(succ)
                        self._requeued[index] += 1
            if nxt is not None:
                self._inline[index] += 1
            completed[index] += 1
            task = nxt

    def _poach(self, index: int, rng: random.Random) -> Task | None:
        try:
            task = self._injector.popleft()
        except IndexError:
            pass
        else:
            self._injector_takes[index] += 1
            return task
        n = self._n
        if n == 1:
            return None
        start = rng.randrange(n)
        for k in range(n):
            victim = start + k
            if victim >= n:
                victim -= n
            if victim == index:
                continue
            dq = self._deques[victim]
            for _ in range(_RETRY_LIMIT):
                got = dq.steal()
                if got is RETRY:
                    continue
                if got is EMPTY:
                    break
                self._stolen[index] += 1
                return got
        return None

    def _work_visible(self) -> bool:
        if self._injector:
            return True
        for dq in self._deques:
            if len(dq):
                return True
        return False

    @staticmethod
    def _spin_pause(sweeps: int) -> None:
        if sweeps < 32:
            return
        if sweeps < 64:
            time.sleep(0)
            return
        time.sleep(min(0.001, 0.00005 * (1 << ((sweeps - 64) >> 4))))
