import threading
from typing import Union


class GroupAllocator:
    """Hands out element groups that no earlier caller has seen.

    This is the only mutable state in a build; the lock makes it safe to share
    between concurrent builders.
    """

    def __init__(self, start: int = 1) -> None:
        if start < 0:
            raise ValueError("groups are non-negative")
        self._next = start
        self._lock = threading.Lock()

    def next_group(self) -> int:
        return self.reserve(1)

    def reserve(self, n: int) -> int:
        """Reserve ``n`` consecutive groups and return the first one."""
        if n < 1:
            raise ValueError("reserve at least one group")
        with self._lock:
            first = self._next
            self._next += n
        return first

    def advance_past(self, groups: Union[frozenset[int], set[int]]) -> None:
        # Families read from disk may already use groups; never hand those out again.
        if not groups:
            return
        with self._lock:
            self._next = max(self._next, max(groups) + 1)

    @property
    def peek(self) -> int:
        return self._next


def get_allocator(start: int = 1) -> GroupAllocator:
    # One allocator per top-level command keeps artifact group numbering deterministic.
    return GroupAllocator(start=start)
