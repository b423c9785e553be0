"""Work-stealing thread pool with task-graph execution."""

from .atomics import AtomicInt
from .deque import EMPTY, RETRY, WorkStealingDeque
from .executor import PoolShutDownError, PoolStats, ThreadPool
from .task_graph import (
    CrossGraphError,
    CycleError,
    GraphFrozenError,
    SelfDependencyError,
    Task,
    TaskGraph,
)

__version__ = "0.1.0"

__all__ = [
    "AtomicInt",
    "CrossGraphError",
    "CycleError",
    "EMPTY",
    "GraphFrozenError",
    "PoolShutDownError",
    "PoolStats",
    "RETRY",
    "SelfDependencyError",
    "Task",
    "TaskGraph",
    "ThreadPool",
    "WorkStealingDeque",
]
