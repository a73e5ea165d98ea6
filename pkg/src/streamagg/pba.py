"""Priority-based aggregation: a fixed-size weighted reservoir of key totals.

Every key present in the reservoir carries a weight ``w`` (sum of its item
sizes since admission) and a uniform randomizer ``u``; its *priority* is
``w / u``.  When a new key arrives at a full reservoir, the smallest priority
among the current entries and the newcomer is discarded, and the running
threshold ``z*`` becomes the maximum priority ever discarded.  Surviving
entries owe a multiplicative estimate correction ``1 / q`` where
``q = min(1, w / z*)`` is their inclusion probability; because ``z*`` only
grows, the correction can be deferred until a key is next touched or queried
instead of being applied at every discard.

Estimate bookkeeping is designed so the deferred schedule is *bit-exact*
equal to applying corrections eagerly at every discard:

  * Each entry stores ``scaled = estimate * q`` instead of the estimate.
    Size increments enter as ``scaled += x * q``; threshold updates change
    only ``q``, never ``scaled``, so no rounding is introduced by rescaling.
  * ``q`` is stored as the pair ``(clamp_w, clamp_z)`` realizing the minimum
    of all ``w/z`` clamps applied so far, rather than as their rounded float
    product chain.  Since division is monotone and the running threshold is
    the max of the per-discard thresholds, the minimum over per-discard
    clamps with the same ``w`` equals the single clamp at ``z*`` exactly.
    Pair replacement is decided exactly (rational comparison on float ties),
    so both schedules keep identical pairs.

A practical consequence: an entry that was never touched after its single
admitting item has ``scaled == clamp_w``, so its estimate
``(scaled / clamp_w) * clamp_z`` is *exactly* ``max(x, z*)``, matching the
classic priority-sampling estimator without double-rounding artifacts.

The error-filtered variant (``pba_ef``) omits the admitting item's
contribution from the estimate (``scaled`` starts at 0) every time a key is
instantiated.  This trades a one-sided downward bias for a large variance
reduction on small keys, which otherwise appear with huge estimates
``~ z*`` on the rare occasions they are sampled.
"""

from __future__ import annotations

from fractions import Fraction
from random import Random

from ._seeding import derive_seed
from .hashheap import HashHeap
from .model import (
    AggregatorConfig,
    Key,
    StreamAggregator,
    StreamItem,
    Summary,
    check_item,
    fingerprint64,
)


class ReservoirEntry:
    """State of one retained key.

    Attributes:
        key: the original key.
        fp: 64-bit fingerprint (identity inside the reservoir).
        weight: total size observed for the key since admission.
        u: uniform randomizer in (0, 1]; priority is ``weight / u``.
        scaled: inclusion-probability-scaled estimate accumulator.
        clamp_w, clamp_z: pair whose ratio is the entry's inclusion
            probability q; ``clamp_z == 0.0`` means unclamped (q = 1).
    """

    __slots__ = ("key", "fp", "weight", "u", "scaled", "clamp_w", "clamp_z")

    def __init__(self, key: Key, fp: int, weight: float, u: float, scaled: float):
        self.key = key
        self.fp = fp
        self.weight = weight
        self.u = u
        self.scaled = scaled
        self.clamp_w = 0.0
        self.clamp_z = 0.0

    @property
    def q(self) -> float:
        """Current inclusion probability (1/ estimate correction factor)."""
        if self.clamp_z == 0.0:
            return 1.0
        return self.clamp_w / self.clamp_z

    def apply_threshold(self, z: float) -> None:
        """Clamp q with the candidate pair (weight, z); keep the smaller ratio.

        The comparison ``weight/z < clamp_w/clamp_z`` is decided exactly:
        float cross-products are conclusive unless they tie (rounding is
        monotone), and ties fall back to rational arithmetic.
        """
        if z <= 0.0:
            return
        w = self.weight
        cz = self.clamp_z
        if cz == 0.0:
            if w < z:
                self.clamp_w = w
                self.clamp_z = z
            return
        cw = self.clamp_w
        left = w * cz
        right = cw * z
        if left > right:
            return
        if left == right and not (
            Fraction(w) * Fraction(cz) < Fraction(cw) * Fraction(z)
        ):
            return
        self.clamp_w = w
        self.clamp_z = z

    def estimate(self) -> float:
        if self.clamp_z == 0.0:
            return self.scaled
        return (self.scaled / self.clamp_w) * self.clamp_z


class PbaAggregator(StreamAggregator):
    """Priority-based aggregation over a hash-indexed min-heap reservoir.

    Consecutive items with the same key are pre-aggregated before touching
    the reservoir, which both sharpens estimates (one randomizer decision for
    the merged mass) and saves hash/heap work on bursty streams.
    """

    _MODES = ("pba", "pba_ef")

    def __init__(self, config: AggregatorConfig):
        if config.mode not in self._MODES:
            raise ValueError(f"{type(self).__name__} does not support mode {config.mode!r}")
        super().__init__()
        self.config = config
        self.mode = config.mode
        self._ef = config.mode.endswith("_ef")
        self._hh = HashHeap(config.capacity)
        self._rng = Random(derive_seed(config.seed, "agg-rng"))
        self._zstar = 0.0
        self._buf_key: Key | None = None
        self._buf_size = 0.0

    # -- stream ingestion ----------------------------------------------------

    def observe(self, item: StreamItem | tuple[Key, float]) -> None:
        key, size = item
        size = check_item(key, size)
        self._items_processed += 1
        buf_key = self._buf_key
        if buf_key is not None:
            if buf_key == key:
                self._buf_size += size
                return
            self._ingest(buf_key, self._buf_size)
        self._buf_key = key
        self._buf_size = size

    def _flush(self) -> None:
        if self._buf_key is not None:
            key, size = self._buf_key, self._buf_size
            self._buf_key = None
            self._buf_size = 0.0
            self._ingest(key, size)

    def _ingest(self, key: Key, x: float) -> None:
        fp = fingerprint64(key)
        entry = self._hh.lookup(fp)
        if entry is not None:
            # Cached key: settle the pending threshold correction first, then
            # accumulate at the post-correction inclusion probability.
            entry.apply_threshold(self._zstar)
            entry.scaled += x * entry.q
            self._hh.increase_weight(fp, x)
        else:
            self._admit_new(key, fp, x)

    def _initial_scaled(self, x: float) -> float:
        return x

    def _admit_new(self, key: Key, fp: int, x: float) -> None:
        hh = self._hh
        u = 1.0 - self._rng.random()  # in (0, 1]
        scaled0 = 0.0 if self._ef else self._initial_scaled(x)
        entry = ReservoirEntry(key, fp, x, u, scaled0)
        if not hh.is_full:
            hh.insert(entry)
            self._insertions += 1
            return
        root = hh.min_entry()
        cand_pr = x / u
        root_pr = root.weight / root.u
        if cand_pr < root_pr or (cand_pr == root_pr and fp < root.fp):
            # The newcomer itself is the discard; no reservoir write needed.
            self._rejections += 1
            if cand_pr > self._zstar:
                self._zstar = cand_pr
            return
        evicted = hh.replace_min(entry)
        self._insertions += 1
        self._evictions += 1
        evicted_pr = evicted.weight / evicted.u
        if evicted_pr > self._zstar:
            self._zstar = evicted_pr

    # -- queries ---------------------------------------------------------------

    @property
    def threshold(self) -> float:
        """Running maximum of discarded priorities (z*)."""
        return self._zstar

    def query(self, key: Key) -> float:
        self._flush()
        entry = self._hh.lookup(fingerprint64(key))
        if entry is None:
            return 0.0
        entry.apply_threshold(self._zstar)
        return entry.estimate()

    def summary(self) -> Summary:
        self._flush()
        z = self._zstar
        pairs = []
        for entry in self._hh.entries():
            entry.apply_threshold(z)
            pairs.append((entry.key, entry.estimate()))
        return Summary.build(
            pairs,
            self._hh.capacity,
            self._items_processed,
            self._evictions,
            self._rejections,
        )

    @property
    def reservoir_swaps(self) -> int:
        """Heap sift moves so far (amortized-cost instrumentation)."""
        return self._hh.swap_count
