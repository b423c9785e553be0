"""Shared-counter primitives built on CPython's execution model.

CPython interleaves threads at bytecode granularity under the interpreter
lock, so a plain attribute load or store is indivisible and all threads
observe stores in a single global order. Compound read-modify-write
sequences are *not* indivisible; the operations below guard those with a
short critical section, which is the closest Python analogue of a
hardware compare-and-swap.
"""

from __future__ import annotations

import threading


class AtomicInt:
    """An integer cell with indivisible read-modify-write operations."""

    __slots__ = ("_value", "_lock")

    def __init__(self, value: int = 0) -> None:
        self._value = value
        self._lock = threading.Lock()

    def load(self) -> int:
        # Plain read: indivisible under the interpreter lock.
        return self._value

    def store(self, value: int) -> None:
        self._value = value

    def add(self, delta: int) -> int:
        """Add ``delta`` and return the updated value."""
        with self._lock:
            self._value += delta
            return self._value

    def compare_and_set(self, expect: int, update: int) -> bool:
        """Install ``update`` only if the current value is ``expect``."""
        with self._lock:
            if self._value != expect:
                return False
            self._value = update
            return True
