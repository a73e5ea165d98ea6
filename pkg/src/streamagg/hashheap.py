"""Fixed-capacity min-heap with a hash index for keyed access.

The reservoir of a priority-based aggregator needs three things fast:
  * find an entry by key fingerprint (cached-key updates),
  * read/replace the minimum-priority entry (eviction decisions),
  * restore heap order after an entry's weight (hence priority) grows.

This combines an array binary min-heap ordered by ``weight / u`` with an
open-addressing hash table mapping fingerprints to heap offsets.  Entries do
not carry back-pointers; the table row is found by probing from the
fingerprint's home slot, and rows move with backward-shift deletion (no
tombstones).  The table is sized to the next power of two >= 2 * capacity,
keeping the load factor at or below one half, so probes are O(1) on average.

Ties on priority are broken by fingerprint so that the heap order (and
therefore every eviction decision) is a deterministic function of the
entries, never of insertion history.

Entries are any objects with ``weight``, ``u`` and ``fp`` attributes, where
``priority = weight / u`` and ``fp`` is a 64-bit int unique per key.
"""

from __future__ import annotations

from typing import Iterator, Optional

_EMPTY = -1


class HashHeap:
    """Min-heap of reservoir entries, indexable by key fingerprint."""

    __slots__ = ("_capacity", "_heap", "_tfp", "_toff", "_mask", "_swaps")

    def __init__(self, capacity: int) -> None:
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self._capacity = capacity
        tsize = 8
        while tsize < 2 * capacity:
            tsize <<= 1
        self._tfp = [0] * tsize       # fingerprint per occupied slot
        self._toff = [_EMPTY] * tsize  # heap offset, or _EMPTY
        self._mask = tsize - 1
        self._heap: list = []
        self._swaps = 0

    # -- basic introspection ------------------------------------------------

    def __len__(self) -> int:
        return len(self._heap)

    def __contains__(self, fp: int) -> bool:
        return self.lookup(fp) is not None

    @property
    def capacity(self) -> int:
        return self._capacity

    @property
    def is_full(self) -> bool:
        return len(self._heap) >= self._capacity

    @property
    def swap_count(self) -> int:
        """Total entry moves performed by sift operations so far."""
        return self._swaps

    @property
    def table_size(self) -> int:
        return self._mask + 1

    def entries(self) -> Iterator:
        """All entries, in unspecified (heap array) order."""
        return iter(self._heap)

    def min_entry(self):
        """The entry with the smallest (priority, fp)."""
        return self._heap[0]

    # -- hash table ---------------------------------------------------------

    def lookup(self, fp: int) -> Optional[object]:
        """Entry with fingerprint ``fp``, or None."""
        tfp = self._tfp
        toff = self._toff
        mask = self._mask
        slot = fp & mask
        while True:
            off = toff[slot]
            if off == _EMPTY:
                return None
            if tfp[slot] == fp:
                return self._heap[off]
            slot = (slot + 1) & mask

    def _slot_of(self, fp: int) -> int:
        # Slot currently holding fp; fp must be present.
        tfp = self._tfp
        toff = self._toff
        mask = self._mask
        slot = fp & mask
        while True:
            if toff[slot] == _EMPTY:
                raise KeyError(fp)
            if tfp[slot] == fp:
                return slot
            slot = (slot + 1) & mask

    def _table_insert(self, fp: int, off: int) -> None:
        tfp = self._tfp
        toff = self._toff
        mask = self._mask
        slot = fp & mask
        while toff[slot] != _EMPTY:
            if tfp[slot] == fp:
                raise KeyError(f"duplicate fingerprint {fp}")
            slot = (slot + 1) & mask
        tfp[slot] = fp
        toff[slot] = off

    def _table_delete(self, fp: int) -> None:
        # Backward-shift deletion: close the hole, then keep pulling back any
        # follower whose home slot lies at or before the hole, so every probe
        # chain stays gap-free.
        tfp = self._tfp
        toff = self._toff
        mask = self._mask
        slot = self._slot_of(fp)
        toff[slot] = _EMPTY
        j = slot
        while True:
            j = (j + 1) & mask
            if toff[j] == _EMPTY:
                return
            home = tfp[j] & mask
            if (j - home) & mask >= (j - slot) & mask:
                tfp[slot] = tfp[j]
                toff[slot] = toff[j]
                toff[j] = _EMPTY
                slot = j

    # -- heap ---------------------------------------------------------------

    def _update_slot(self, fp: int, off: int) -> None:
        self._toff[self._slot_of(fp)] = off

    def _sift_toward_root(self, pos: int) -> None:
        heap = self._heap
        entry = heap[pos]
        pr = entry.weight / entry.u
        fp = entry.fp
        while pos > 0:
            parent_pos = (pos - 1) >> 1
            parent = heap[parent_pos]
            ppr = parent.weight / parent.u
            if ppr < pr or (ppr == pr and parent.fp < fp):
                break
            heap[pos] = parent
            self._update_slot(parent.fp, pos)
            self._swaps += 1
            pos = parent_pos
        heap[pos] = entry
        self._update_slot(fp, pos)

    def _sift_toward_leaves(self, pos: int) -> None:
        heap = self._heap
        n = len(heap)
        entry = heap[pos]
        pr = entry.weight / entry.u
        fp = entry.fp
        while True:
            child = 2 * pos + 1
            if child >= n:
                break
            ce = heap[child]
            cpr = ce.weight / ce.u
            right = child + 1
            if right < n:
                re = heap[right]
                rpr = re.weight / re.u
                if rpr < cpr or (rpr == cpr and re.fp < ce.fp):
                    child = right
                    ce = re
                    cpr = rpr
            if pr < cpr or (pr == cpr and fp < ce.fp):
                break
            heap[pos] = ce
            self._update_slot(ce.fp, pos)
            self._swaps += 1
            pos = child
        heap[pos] = entry
        self._update_slot(fp, pos)

    # -- mutation -----------------------------------------------------------

    def insert(self, entry) -> None:
        """Add a new entry; raises if full or if the fingerprint is present."""
        if self.is_full:
            raise OverflowError("reservoir is full; use replace_min")
        heap = self._heap
        self._table_insert(entry.fp, len(heap))
        heap.append(entry)
        self._sift_toward_root(len(heap) - 1)

    def increase_weight(self, fp: int, delta: float):
        """Add ``delta`` (> 0) to an entry's weight and restore heap order.

        Returns the entry.  Raises KeyError if absent.
        """
        pos = self._toff[self._slot_of(fp)]
        entry = self._heap[pos]
        entry.weight += delta
        self._sift_toward_leaves(pos)
        return entry

    def replace_min(self, entry):
        """Swap the minimum entry out for a new one; returns the evicted entry."""
        heap = self._heap
        if not heap:
            raise IndexError("replace_min on empty reservoir")
        evicted = heap[0]
        self._table_delete(evicted.fp)
        self._table_insert(entry.fp, 0)
        heap[0] = entry
        self._sift_toward_leaves(0)
        return evicted

    # -- verification -------------------------------------------------------

    def validate(self) -> None:
        """Check every structural invariant; raises AssertionError on damage.

        Intended for tests and fuzzing: O(capacity + table size).
        """
        heap = self._heap
        tfp = self._tfp
        toff = self._toff
        mask = self._mask
        # Heap order, including deterministic tie-break.
        for pos in range(1, len(heap)):
            parent = heap[(pos - 1) >> 1]
            child = heap[pos]
            pkey = (parent.weight / parent.u, parent.fp)
            ckey = (child.weight / child.u, child.fp)
            assert pkey < ckey, f"heap violation at {pos}: {pkey} !< {ckey}"
        # Table <-> heap bijection.
        occupied = [s for s in range(mask + 1) if toff[s] != _EMPTY]
        assert len(occupied) == len(heap), "table/heap size mismatch"
        for slot in occupied:
            off = toff[slot]
            assert 0 <= off < len(heap), f"slot {slot}: bad offset {off}"
            assert heap[off].fp == tfp[slot], f"slot {slot}: fp mismatch"
        # Probe chains are gap-free: walking home..slot never crosses _EMPTY.
        for slot in occupied:
            j = tfp[slot] & mask
            while j != slot:
                assert toff[j] != _EMPTY, f"broken probe chain for slot {slot}"
                j = (j + 1) & mask
