"""Tasks, dependency edges, and the graphs that own them.

A task wraps a no-argument callable and remembers which tasks depend on
it (its successors) plus how many of its own predecessors have not yet
completed. Wiring happens single-threaded before a graph is handed to a
pool; during execution only the pending-predecessor count is touched, by
whichever worker threads finish the predecessors.
"""

from __future__ import annotations

from typing import Callable, Iterator, Optional


class SelfDependencyError(ValueError):
    """A task was asked to succeed itself."""


class CrossGraphError(ValueError):
    """An edge was requested between tasks of different graphs."""


class GraphFrozenError(RuntimeError):
    """The graph was modified or resubmitted while submitted."""


class CycleError(ValueError):
    """The graph contains a dependency cycle.

    ``tasks`` holds one full cycle, in edge order.
    """

    def __init__(self, tasks: tuple["Task", ...]) -> None:
        self.tasks = tasks
        path = " -> ".join(repr(t) for t in tasks)
        super().__init__(f"dependency cycle: {path} -> {tasks[0]!r}")


class Task:
    """A unit of work plus its outgoing dependency edges.

    ``pending_predecessors`` is stored as a list of the tokens
    ``0 .. n-1``. A completing predecessor removes one token with
    ``list.pop()``, which CPython executes indivisibly, and the unique
    consumer that receives token 0 knows it was the last one; that is the
    whole atomic decrement-and-test, with no per-task lock.
    """

    __slots__ = ("work", "_successors", "_pending", "_initial", "_graph", "_index", "name")

    def __init__(self, work: Callable[[], None], *, name: str | None = None) -> None:
        if not callable(work):
            raise TypeError("task work must be callable")
        self.work = work
        self.name = name
        self._successors: list[Task] = []
        self._pending: list[int] = []
        self._initial = 0
        self._graph: Optional[TaskGraph] = None
        self._index: int | None = None

    def __repr__(self) -> str:
        label = self.name if self.name is not None else (
            f"#{self._index}" if self._index is not None else f"@{id(self):x}"
        )
        return f"<Task {label}>"

    @property
    def pending_predecessors(self) -> int:
        return len(self._pending)

    @property
    def initial_predecessors(self) -> int:
        return self._initial

    @property
    def successors(self) -> tuple["Task", ...]:
        return tuple(self._successors)

    def succeed(self, *predecessors: "Task") -> None:
        """Run this task only after every one of ``predecessors``.

        Appends this task to each predecessor's successor list and raises
        this task's pending count accordingly. Duplicate edges are counted
        as given, not deduplicated. No-op for an empty predecessor set.
        """
        for pred in predecessors:
            if pred is self:
                raise SelfDependencyError(f"{self!r} cannot succeed itself")
            if pred._graph is not self._graph:
                raise CrossGraphError(
                    f"{pred!r} and {self!r} belong to different graphs"
                )
        self._check_mutable()
        for pred in predecessors:
            pred._successors.append(self)
        n = len(predecessors)
        start = self._initial
        self._initial = start + n
        self._pending.extend(range(start, start + n))

    # Lower-level halves of succeed(), for wiring dynamic task families
    # where the signalling task does not exist yet at declaration time.
    # Restricted to free-standing tasks: graph-owned tasks must go through
    # succeed() so that edge counts and pending counts stay in lockstep.

    def add_successor(self, successor: "Task") -> None:
        """Have ``successor`` notified when this task completes."""
        if successor is self:
            raise SelfDependencyError(f"{self!r} cannot succeed itself")
        if self._graph is not None or successor._graph is not None:
            raise CrossGraphError("add_successor is for free-standing tasks; use succeed()")
        self._successors.append(successor)

    def increment_pending(self, count: int = 1) -> None:
        """Expect ``count`` more completion signals before becoming ready."""
        if count < 0:
            raise ValueError("count must be non-negative")
        if self._graph is not None:
            raise CrossGraphError("increment_pending is for free-standing tasks; use succeed()")
        start = self._initial
        self._initial = start + count
        self._pending.extend(range(start, start + count))

    def _finish_one_predecessor(self) -> bool:
        """Consume one completion signal; True if it was the last one."""
        return self._pending.pop() == 0

    def _rearm(self) -> None:
        self._pending = list(range(self._initial))

    def _check_mutable(self) -> None:
        if self._graph is not None and self._graph._submitted:
            raise GraphFrozenError("graph already submitted; reset() before rewiring")


class TaskGraph:
    """An owning, identity-stable collection of tasks and their edges."""

    __slots__ = ("_tasks", "_submitted")

    def __init__(self) -> None:
        self._tasks: list[Task] = []
        self._submitted = False

    def __len__(self) -> int:
        return len(self._tasks)

    def __iter__(self) -> Iterator[Task]:
        return iter(self._tasks)

    @property
    def tasks(self) -> tuple[Task, ...]:
        return tuple(self._tasks)

    @property
    def submitted(self) -> bool:
        return self._submitted

    def add_task(self, work: Callable[[], None], *, name: str | None = None) -> Task:
        """Create a task with no edges and return a stable reference to it."""
        if self._submitted:
            raise GraphFrozenError("graph already submitted; reset() before adding")
        task = Task(work, name=name)
        task._graph = self
        task._index = len(self._tasks)
        self._tasks.append(task)
        return task

    def validate(self) -> None:
        """Raise CycleError unless the edges form a DAG. Leaves the graph untouched."""
        indegree = [t.initial_predecessors for t in self._tasks]
        ready = [i for i, d in enumerate(indegree) if d == 0]
        peeled = 0
        while ready:
            i = ready.pop()
            peeled += 1
            for succ in self._tasks[i]._successors:
                j = succ._index
                indegree[j] -= 1
                if indegree[j] == 0:
                    ready.append(j)
        if peeled == len(self._tasks):
            return
        self._raise_cycle(indegree)

    def reset(self) -> None:
        """Restore every pending count to its wired value for a re-run.

        Must not be called while an execution is in flight.
        """
        for task in self._tasks:
            task._rearm()
        self._submitted = False

    def _freeze_for_run(self) -> None:
        if self._submitted:
            raise GraphFrozenError("graph is already submitted; reset() to run it again")
        self._submitted = True

    def _raise_cycle(self, indegree: list[int]) -> None:
        # Every unpeeled node kept a positive in-degree from other unpeeled
        # nodes, so walking predecessors inside that set must revisit a node;
        # the revisited stretch is a cycle.
        remaining = {i for i, d in enumerate(indegree) if d > 0}
        preds: dict[int, int] = {}
        for i in remaining:
            for succ in self._tasks[i]._successors:
                if succ._index in remaining:
                    preds[succ._index] = i
        node = next(iter(remaining))
        seen: dict[int, int] = {}
        path: list[int] = []
        while node not in seen:
            seen[node] = len(path)
            path.append(node)
            node = preds[node]
        cycle = path[seen[node]:]
        cycle.reverse()  # follow edge direction
        raise CycleError(tuple(self._tasks[i] for i in cycle))
