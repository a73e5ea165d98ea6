"""Core datatypes and the aggregator interface.

A stream is a sequence of ``(key, size)`` items.  An aggregator consumes the
stream under a fixed memory budget and can afterwards (or at any point
mid-stream) be asked for per-key estimates of the total size aggregated per
key.  Estimates of keys that are not retained are 0, which together with
per-key unbiasedness makes subset sums unbiased as well.
"""

from __future__ import annotations

import hashlib
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Iterable, Iterator, NamedTuple, Union

from ._seeding import MASK64, mix64

Key = Union[int, str, bytes]

#: Recognized aggregation modes, in rough order of sophistication.
MODES = ("exact", "sh", "ash", "pba", "pba_ef", "pbash", "pbash_ef")


class StreamItem(NamedTuple):
    """One stream element: a key and a positive size (bytes, packets, ...)."""

    key: Key
    size: float


class KeyEstimate(NamedTuple):
    """One summary row: a key and its estimated total size."""

    key: Key
    estimate: float


def fingerprint64(key: Key) -> int:
    """Map a key to a 64-bit fingerprint.

    Integer keys are mixed bijectively (after masking to 64 bits), so two
    distinct in-range ints never collide.  String/bytes keys are hashed with
    BLAKE2b under distinct domain prefixes; a collision between two distinct
    keys has probability ~2**-64 and would make the aggregator treat them as
    one key.
    """
    if isinstance(key, int):
        return mix64(key & MASK64)
    if isinstance(key, str):
        raw = b"s\x00" + key.encode("utf-8")
    elif isinstance(key, bytes):
        raw = b"b\x00" + key
    else:
        raise TypeError(f"unsupported key type: {type(key).__name__}")
    return int.from_bytes(hashlib.blake2b(raw, digest_size=8).digest(), "big")


def canonical_key_order(key: Key) -> tuple[int, bytes]:
    """Deterministic total order over all supported key types.

    Used to break ties when sorting summaries, so that equal estimates always
    appear in the same order regardless of insertion history.
    """
    if isinstance(key, int):
        return (0, (key & MASK64).to_bytes(8, "big"))
    if isinstance(key, str):
        return (1, key.encode("utf-8"))
    if isinstance(key, bytes):
        return (2, key)
    raise TypeError(f"unsupported key type: {type(key).__name__}")


def check_item(key: Key, size: float) -> float:
    """Validate one stream item; returns the size as a float.

    Sizes must be positive and finite.  Zero, negative, NaN and infinite
    sizes are rejected rather than silently skewing estimates.
    """
    size = float(size)
    if not (size > 0.0 and math.isfinite(size)):
        raise ValueError(f"item size must be positive and finite, got {size!r}")
    if not isinstance(key, (int, str, bytes)):
        raise TypeError(f"unsupported key type: {type(key).__name__}")
    return size


@dataclass(frozen=True)
class AggregatorConfig:
    """Construction-time parameters of an aggregator.

    Attributes:
        capacity: reservoir/cache size m (ignored by ``exact`` and ``sh``,
            which are unbounded; kept for symmetric bookkeeping).
        mode: one of :data:`MODES`.
        seed: base seed; aggregators with equal config fed equal streams
            produce bit-identical summaries.
        sh_threshold: fixed admission threshold z for ``sh`` mode only.
    """

    capacity: int
    mode: str
    seed: int = 0
    sh_threshold: float | None = None

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if self.capacity < 1:
            raise ValueError("capacity must be >= 1")
        if self.mode == "sh":
            if self.sh_threshold is None or not (self.sh_threshold > 0):
                raise ValueError("sh mode requires a positive sh_threshold")
        elif self.sh_threshold is not None:
            raise ValueError("sh_threshold is only meaningful for sh mode")


@dataclass(frozen=True)
class Summary:
    """Queryable result of an aggregation run.

    ``entries`` is sorted by descending estimate, ties broken by canonical
    key order.
    """

    entries: tuple[KeyEstimate, ...]
    reservoir_capacity: int
    items_processed: int
    evictions: int
    rejections: int

    @classmethod
    def build(
        cls,
        pairs: Iterable[tuple[Key, float]],
        reservoir_capacity: int,
        items_processed: int,
        evictions: int,
        rejections: int,
    ) -> "Summary":
        entries = tuple(
            KeyEstimate(k, e)
            for k, e in sorted(pairs, key=lambda p: (-p[1], canonical_key_order(p[0])))
        )
        return cls(entries, reservoir_capacity, items_processed, evictions, rejections)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self) -> Iterator[KeyEstimate]:
        return iter(self.entries)

    def as_dict(self) -> dict[Key, float]:
        return {k: e for k, e in self.entries}

    def estimate(self, key: Key) -> float:
        for k, e in self.entries:
            if k == key:
                return e
        return 0.0

    def subset_sum(self, keys: Iterable[Key]) -> float:
        """Estimated total size of an arbitrary key subset (absent keys count 0)."""
        wanted = set(keys)
        return math.fsum(e for k, e in self.entries if k in wanted)

    def total(self) -> float:
        return math.fsum(e for _, e in self.entries)


class StreamAggregator(ABC):
    """Common interface: feed items, then query keys or take a summary.

    Queries and summaries are allowed mid-stream and do not disturb
    subsequent processing.
    """

    mode: str = "?"

    def __init__(self) -> None:
        self._items_processed = 0
        self._insertions = 0
        self._evictions = 0
        self._rejections = 0

    @abstractmethod
    def observe(self, item: StreamItem | tuple[Key, float]) -> None:
        """Process one stream item."""

    def observe_all(self, items: Iterable[StreamItem | tuple[Key, float]]) -> None:
        for item in items:
            self.observe(item)

    @abstractmethod
    def query(self, key: Key) -> float:
        """Current estimate for one key (0.0 if not retained)."""

    @abstractmethod
    def summary(self) -> Summary:
        """Snapshot of all retained keys and their estimates."""

    @property
    def items_processed(self) -> int:
        return self._items_processed

    @property
    def insertions(self) -> int:
        """Number of admissions into the reservoir/cache."""
        return self._insertions

    @property
    def evictions(self) -> int:
        return self._evictions

    @property
    def rejections(self) -> int:
        """Number of stream items dropped without entering the reservoir."""
        return self._rejections


def make_aggregator(config: AggregatorConfig, **options) -> StreamAggregator:
    """Instantiate the aggregator selected by ``config.mode``.

    Extra keyword options are implementation choices that do not change the
    sampling semantics (currently only ``round_impl`` for ``ash``).
    """
    from . import baselines, pba, pbash

    mode = config.mode
    if mode == "exact":
        return baselines.ExactAggregator(config, **options)
    if mode == "sh":
        return baselines.ShAggregator(config, **options)
    if mode == "ash":
        return baselines.AshAggregator(config, **options)
    if mode in ("pba", "pba_ef"):
        return pba.PbaAggregator(config, **options)
    if mode in ("pbash", "pbash_ef"):
        return pbash.PbashAggregator(config, **options)
    raise ValueError(f"unknown mode {mode!r}")
