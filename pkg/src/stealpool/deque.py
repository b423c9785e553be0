"""Chase-Lev-style work-stealing deque.

One designated owner thread pushes and pops at the bottom; any number of
other threads ("thieves") steal at the top. The owner consumes in LIFO
order, thieves in FIFO order, and every pushed item is consumed exactly
once across all consumers. The backing circular buffer doubles in place
when full, preserving every live element at its sequence index.

Synchronization discipline: every shared access is an operation that is
indivisible on its own. Under CPython's interpreter lock, plain loads and
stores of ``top``, ``bottom`` and the buffer reference are indivisible and
totally ordered, and bytecode side effects are never reordered, which
gives the sequentially consistent behaviour the algorithm needs. The one
contended read-modify-write transition, advancing ``top``, goes through a
short critical section that acts as the compare-and-swap. No standalone
fence is used anywhere. The *order* of the loads inside ``pop`` and
``steal`` is load-bearing; see the inline notes.

Statement ordering matters in this module: do not "simplify" by merging
or reordering reads of ``_top``, ``_bottom`` or ``_buffer``.
"""

from __future__ import annotations

import threading
from typing import Any, Optional

DEFAULT_CAPACITY = 64


class _StealMiss:
    """Sentinel for a steal attempt that did not produce an item."""

    __slots__ = ("_label",)

    def __init__(self, label: str) -> None:
        self._label = label

    def __repr__(self) -> str:
        return f"<steal-miss: {self._label}>"


#: No item was observed; the deque looked empty to this thief.
EMPTY = _StealMiss("empty")
#: The thief lost a race for the observed item; retrying immediately is fine.
RETRY = _StealMiss("retry")


class WorkStealingDeque:
    """Single-owner, multi-thief deque over a growable circular buffer.

    ``push`` and ``pop`` must only ever be called from one thread, the
    owner. Ownership is claimed lazily by the first thread that performs
    an owner operation, so the deque may be constructed anywhere and
    handed to its worker before first use. ``steal`` is safe from any
    thread, concurrently with owner operations and with other thieves.
    """

    __slots__ = ("_top", "_top_lock", "_bottom", "_buffer", "_owner", "_growths")

    def __init__(self, capacity: int = DEFAULT_CAPACITY) -> None:
        if capacity < 2 or capacity & (capacity - 1):
            raise ValueError("capacity must be a power of two >= 2")
        self._top = 0
        self._top_lock = threading.Lock()
        self._bottom = 0
        self._buffer: list[Any] = [None] * capacity
        self._owner: int | None = None
        self._growths = 0

    # -- owner side ------------------------------------------------------

    def push(self, item: Any) -> None:
        """Append ``item`` at the bottom (owner only)."""
        if item is None:
            raise ValueError("cannot push None")
        assert self._claim_owner(), "push() called from a non-owner thread"
        b = self._bottom
        t = self._top  # may be stale: top only grows, so size is overestimated
        buf = self._buffer
        if b - t >= len(buf):
            buf = self._grow(t, b)
        buf[b & (len(buf) - 1)] = item
        # Publishing the new bottom is what makes the slot visible to thieves,
        # so it must come after the slot write.
        self._bottom = b + 1

    def pop(self) -> Optional[Any]:
        """Remove and return the newest element, or None (owner only)."""
        assert self._claim_owner(), "pop() called from a non-owner thread"
        b = self._bottom - 1
        # Reserve index b before inspecting top: a thief that reads the
        # lowered bottom afterwards will refuse to race for this slot.
        self._bottom = b
        t = self._top
        if t > b:
            # Already empty; restore the canonical empty shape bottom == top.
            self._bottom = b + 1
            return None
        buf = self._buffer
        idx = b & (len(buf) - 1)
        item = buf[idx]
        if t == b:
            # Last element: thieves holding top == t may race us for it.
            with self._top_lock:
                won = self._top == t
                if won:
                    self._top = t + 1
            self._bottom = t + 1
            buf[idx] = None
            return item if won else None
        # More than one element: index b is unreachable by thieves.
        buf[idx] = None
        return item

    def _grow(self, top: int, bottom: int) -> list[Any]:
        old = self._buffer
        mask = len(old) - 1
        new: list[Any] = [None] * (len(old) * 2)
        nmask = len(new) - 1
        for i in range(top, bottom):
            new[i & nmask] = old[i & mask]
        # Swap only after the copy: a thief reading the new reference must
        # find every live sequence index populated. Thieves still holding
        # the old list are fine; its slots for live indices are never
        # rewritten, and the list stays alive for as long as anyone holds it.
        self._buffer = new
        self._growths += 1
        return new

    # -- thief side ------------------------------------------------------

    def steal(self) -> Any:
        """Take the oldest element, or report EMPTY / RETRY.

        Safe from any thread. RETRY means another consumer won the race
        for the observed element; the caller decides whether to retry.
        """
        # Read top before bottom. An owner pop lowers bottom and then
        # checks top, so with these reads in the opposite order one of the
        # two sides is guaranteed to notice the other.
        t = self._top
        b = self._bottom
        if t >= b:
            return EMPTY
        buf = self._buffer
        item = buf[t & (len(buf) - 1)]
        # The buffer or the slot may be stale by now; the top advance below
        # validates everything read above. Winning it proves the element at
        # sequence index t was still unconsumed, and live sequence indices
        # are never overwritten in any buffer generation.
        with self._top_lock:
            won = self._top == t
            if won:
                self._top = t + 1
        if not won:
            return RETRY
        return item

    # -- introspection ----------------------------------------------------

    def __len__(self) -> int:
        """Element count; exact for the owner, a snapshot for others."""
        return max(0, self._bottom - self._top)

    @property
    def capacity(self) -> int:
        return len(self._buffer)

    @property
    def growth_count(self) -> int:
        return self._growths

    def _claim_owner(self) -> bool:
        me = threading.get_ident()
        if self._owner is None:
            self._owner = me
            return True
        return self._owner == me
