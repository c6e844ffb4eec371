"""Indexed min-priority queue over two-component lexicographic keys."""

from __future__ import annotations

import math
from typing import NamedTuple


class Key(NamedTuple):
    k1: float
    k2: float


INFINITE_KEY = Key(math.inf, math.inf)


def key_leq(a: Key, b: Key) -> bool:
    """Lexicographic precedence: a.k1 < b.k1, or tie with a.k2 <= b.k2."""
    return a.k1 < b.k1 or (a.k1 == b.k1 and a.k2 <= b.k2)


def key_lt(a: Key, b: Key) -> bool:
    """Strict lexicographic precedence: tie on k1 requires a.k2 < b.k2."""
    return a.k1 < b.k1 or (a.k1 == b.k1 and a.k2 < b.k2)


class IndexedQueue:
    """Binary min-heap of (key, vertex) with a vertex -> slot map.

    Supports O(log n) insert, update, remove and O(1) findmin/contains.
    Inserting a member vertex, or updating/removing a non-member, is a
    contract violation and raises ValueError.  Ties between equal keys may
    surface either vertex.
    """

    def __init__(self) -> None:
        # Entries are (k1, k2, vid); tuple comparison gives the
        # lexicographic key order with vid as an arbitrary final tiebreak.
        self._heap: list[tuple[float, float, int]] = []
        self._slot: dict[int, int] = {}

    def __len__(self) -> int:
        return len(self._heap)

    def __contains__(self, vid: int) -> bool:
        return vid in self._slot

    def contains(self, vid: int) -> bool:
        return vid in self._slot

    def key_of(self, vid: int) -> Key:
        slot = self._slot.get(vid)
        if slot is None:
            raise ValueError(f"key_of: vertex {vid} not in queue")
        entry = self._heap[slot]
        return Key(entry[0], entry[1])

    def _sift_up(self, pos: int) -> None:
        heap = self._heap
        entry = heap[pos]
        while pos > 0:
            parent_pos = (pos - 1) >> 1
            parent = heap[parent_pos]
            if entry < parent:
                heap[pos] = parent
                self._slot[parent[2]] = pos
                pos = parent_pos
            else:
                break
        heap[pos] = entry
        self._slot[entry[2]] = pos

    def _sift_down(self, pos: int) -> None:
        heap = self._heap
        end = len(heap)
        entry = heap[pos]
        child = 2 * pos + 1
        while child < end:
            right = child + 1
            if right < end and heap[right] < heap[child]:
                child = right
            if heap[child] < entry:
                heap[pos] = heap[child]
                self._slot[heap[pos][2]] = pos
                pos = child
                child = 2 * pos + 1
            else:
                break
        heap[pos] = entry
        self._slot[entry[2]] = pos

    def insert(self, vid: int, key: Key) -> None:
        if vid in self._slot:
            raise ValueError(f"insert of vertex {vid} already in queue")
        self._heap.append((key[0], key[1], vid))
        self._slot[vid] = len(self._heap) - 1
        self._sift_up(len(self._heap) - 1)

    def update(self, vid: int, key: Key) -> None:
        if vid not in self._slot:
            raise ValueError(f"update of vertex {vid} not in queue")
        pos = self._slot[vid]
        old = self._heap[pos]
        new = (key[0], key[1], vid)
        self._heap[pos] = new
        if new < old:
            self._sift_up(pos)
        else:
            self._sift_down(pos)

    def remove(self, vid: int) -> None:
        if vid not in self._slot:
            raise ValueError(f"remove of vertex {vid} not in queue")
        pos = self._slot.pop(vid)
        last = self._heap.pop()
        if pos < len(self._heap):
            old = self._heap[pos]
            self._heap[pos] = last
            self._slot[last[2]] = pos
            if last < old:
                self._sift_up(pos)
            else:
                self._sift_down(pos)

    def findmin(self) -> tuple[int | None, Key]:
        """Minimum entry without removal; (None, (inf, inf)) when empty."""
        if not self._heap:
            return (None, INFINITE_KEY)
        k1, k2, vid = self._heap[0]
        return (vid, Key(k1, k2))
