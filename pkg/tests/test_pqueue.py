"""Priority queue tests against a brute-force sorted-list reference.

The reference keeps (key, vid) pairs in a plain list and re-sorts on every
operation, so any disagreement points at the heap's bookkeeping.
"""

import math
import random

import pytest

from rrtsharp.pqueue import INFINITE_KEY, IndexedQueue, Key, key_leq, key_lt


class SortedListQueue:
    """Reference implementation: a list kept sorted by (k1, k2, vid)."""

    def __init__(self):
        self.items = {}

    def insert(self, vid, key):
        assert vid not in self.items
        self.items[vid] = key

    def update(self, vid, key):
        assert vid in self.items
        self.items[vid] = key

    def remove(self, vid):
        del self.items[vid]

    def contains(self, vid):
        return vid in self.items

    def findmin(self):
        if not self.items:
            return None, INFINITE_KEY
        best = min(self.items.items(), key=lambda kv: (kv[1].k1, kv[1].k2, kv[0]))
        return best[0], best[1]

    def __len__(self):
        return len(self.items)


def test_key_ordering_lexicographic():
    assert key_lt(Key(1.0, 5.0), Key(2.0, 0.0))
    assert key_lt(Key(1.0, 2.0), Key(1.0, 3.0))
    assert not key_lt(Key(1.0, 3.0), Key(1.0, 3.0))
    assert key_leq(Key(1.0, 3.0), Key(1.0, 3.0))
    assert key_leq(Key(1.0, 2.0), Key(1.0, 3.0))
    assert not key_leq(Key(1.0, 4.0), Key(1.0, 3.0))
    # Infinite keys compare after everything finite.
    assert key_lt(Key(7.25, 7.25), INFINITE_KEY)
    assert key_leq(INFINITE_KEY, INFINITE_KEY)
    assert not key_lt(INFINITE_KEY, INFINITE_KEY)


def test_findmin_empty_sentinel():
    q = IndexedQueue()
    vid, key = q.findmin()
    assert vid is None
    assert key == INFINITE_KEY
    assert math.isinf(key.k1) and math.isinf(key.k2)
    assert len(q) == 0


def test_insert_update_remove_basics():
    q = IndexedQueue()
    q.insert(3, Key(5.0, 1.0))
    q.insert(7, Key(2.0, 9.0))
    assert q.findmin() == (7, Key(2.0, 9.0))
    assert 3 in q and 7 in q and 11 not in q

    q.update(3, Key(1.0, 0.5))
    assert q.findmin() == (3, Key(1.0, 0.5))
    # Keys can also grow.
    q.update(3, Key(10.0, 0.0))
    assert q.findmin() == (7, Key(2.0, 9.0))

    q.remove(7)
    assert q.findmin() == (3, Key(10.0, 0.0))
    q.remove(3)
    assert q.findmin()[0] is None


def test_contract_violations_raise():
    q = IndexedQueue()
    q.insert(1, Key(1.0, 1.0))
    with pytest.raises(ValueError):
        q.insert(1, Key(2.0, 2.0))
    with pytest.raises(ValueError):
        q.update(2, Key(1.0, 1.0))
    with pytest.raises(ValueError):
        q.remove(2)


def test_key_of_reports_current_key():
    q = IndexedQueue()
    q.insert(4, Key(3.0, 3.0))
    assert q.key_of(4) == Key(3.0, 3.0)
    q.update(4, Key(1.5, 0.0))
    assert q.key_of(4) == Key(1.5, 0.0)
    with pytest.raises(ValueError):
        q.key_of(99)


def test_min_key_matches_reference_under_random_interleaving():
    rng = random.Random(2024)
    q = IndexedQueue()
    ref = SortedListQueue()
    present = set()
    next_vid = 0

    for _ in range(20000):
        op = rng.random()
        if op < 0.45 or not present:
            key = Key(rng.uniform(0, 100), rng.uniform(0, 100))
            q.insert(next_vid, key)
            ref.insert(next_vid, key)
            present.add(next_vid)
            next_vid += 1
        elif op < 0.75:
            vid = rng.choice(sorted(present))
            key = Key(rng.uniform(0, 100), rng.uniform(0, 100))
            q.update(vid, key)
            ref.update(vid, key)
        else:
            vid = rng.choice(sorted(present))
            q.remove(vid)
            ref.remove(vid)
            present.discard(vid)

        assert len(q) == len(ref)
        got_vid, got_key = q.findmin()
        want_vid, want_key = ref.findmin()
        # The heap may surface any vertex holding the minimal key; the key
        # itself must agree exactly.
        assert got_key == want_key
        if got_vid is not None:
            assert q.key_of(got_vid) == want_key
        else:
            assert want_vid is None


def test_pop_order_is_nondecreasing():
    rng = random.Random(7)
    q = IndexedQueue()
    for vid in range(500):
        q.insert(vid, Key(rng.uniform(0, 10), rng.uniform(0, 10)))
    last = None
    while len(q):
        vid, key = q.findmin()
        q.remove(vid)
        if last is not None:
            assert key_leq(last, key)
        last = key
