"""Baseline aggregators and the classic batch priority-sampling reference.

Four reference points against which the priority-based reservoir variants are
judged:

  * ``ExactAggregator`` — unbounded dict of true totals (ground truth).
  * ``ShAggregator`` — sample-and-hold with a *fixed* admission threshold:
    unbiased, but memory is stream-dependent and the threshold must be
    guessed in advance.
  * ``AshAggregator`` — adaptive sample-and-hold: a fixed-size cache where
    every overflow triggers a rank competition with fresh exponential
    randomizers; the loser leaves and every survivor's count is inflated by
    its survival probability (a conditional estimate-correction step, so
    totals stay unbiased).  The deletion round touches every cache slot and
    is the reason its per-item cost grows with the cache size.
  * ``priority_sample`` — the textbook batch estimator (top-m priorities,
    threshold = the (m+1)-st priority) that a priority-based reservoir must
    reproduce exactly on streams where every key appears once.
"""

from __future__ import annotations

import math
from random import Random
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from ._seeding import derive_seed
from .model import (
    AggregatorConfig,
    Key,
    StreamAggregator,
    StreamItem,
    Summary,
    check_item,
    fingerprint64,
)


class ExactAggregator(StreamAggregator):
    """Unbounded per-key totals; the ground truth every estimator chases."""

    def __init__(self, config: AggregatorConfig):
        if config.mode != "exact":
            raise ValueError(f"ExactAggregator does not support mode {config.mode!r}")
        super().__init__()
        self.config = config
        self.mode = "exact"
        self._totals: dict[Key, float] = {}

    def observe(self, item: StreamItem | tuple[Key, float]) -> None:
        key, size = item
        size = check_item(key, size)
        self._items_processed += 1
        totals = self._totals
        if key in totals:
            totals[key] += size
        else:
            totals[key] = size
            self._insertions += 1

    def query(self, key: Key) -> float:
        return self._totals.get(key, 0.0)

    def summary(self) -> Summary:
        return Summary.build(
            self._totals.items(),
            max(self.config.capacity, len(self._totals)),
            self._items_processed,
            0,
            0,
        )


class ShAggregator(StreamAggregator):
    """Sample-and-hold with a fixed threshold z.

    A key's first item is admitted with probability ``min(1, x / z)`` and
    credited ``max(x, z)``; afterwards the key is counted exactly.  Memory is
    unbounded (whatever passes the gate stays), which is the practical
    drawback the adaptive variants remove.
    """

    def __init__(self, config: AggregatorConfig):
        if config.mode != "sh":
            raise ValueError(f"ShAggregator does not support mode {config.mode!r}")
        super().__init__()
        self.config = config
        self.mode = "sh"
        self._z = float(config.sh_threshold)
        self._rng = Random(derive_seed(config.seed, "agg-rng"))
        self._counts: dict[Key, float] = {}

    def observe(self, item: StreamItem | tuple[Key, float]) -> None:
        key, size = item
        size = check_item(key, size)
        self._items_processed += 1
        counts = self._counts
        if key in counts:
            counts[key] += size
            return
        z = self._z
        if size < z and self._rng.random() >= size / z:
            self._rejections += 1
            return
        counts[key] = max(size, z)
        self._insertions += 1

    def query(self, key: Key) -> float:
        return self._counts.get(key, 0.0)

    def summary(self) -> Summary:
        return Summary.build(
            self._counts.items(),
            max(self.config.capacity, len(self._counts)),
            self._items_processed,
            0,
            self._rejections,
        )


class AshAggregator(StreamAggregator):
    """Adaptive sample-and-hold over a fixed-size cache.

    Uncached keys are always admitted; when the cache exceeds its capacity m,
    one *deletion round* runs: every entry j draws a fresh Exp(1) randomizer
    e_j and competes on the rank ``e_j / a_j``; the largest rank is evicted
    and the evicted rank ``tau`` becomes the round's survival threshold.
    Each survivor's count is divided by its survival probability
    ``1 - exp(-a_j * tau)``, keeping per-key totals unbiased conditional on
    the cache state entering the round.  Exactly m + 1 randomizers are drawn
    per round and every slot is touched, so a round costs O(m).

    ``round_impl`` selects between two implementations of the same round:
    ``"scalar"`` (plain Python loop; the reference, and what complexity
    benchmarks should time) and ``"vector"`` (numpy bulk draws; identical
    procedure and distribution, different random streams, much faster for
    large Monte Carlo sweeps).
    """

    def __init__(self, config: AggregatorConfig, round_impl: str = "scalar"):
        if config.mode != "ash":
            raise ValueError(f"AshAggregator does not support mode {config.mode!r}")
        if round_impl not in ("scalar", "vector"):
            raise ValueError(f"round_impl must be 'scalar' or 'vector', got {round_impl!r}")
        super().__init__()
        self.config = config
        self.mode = "ash"
        self.round_impl = round_impl
        self._m = config.capacity
        if round_impl == "scalar":
            self._rng = Random(derive_seed(config.seed, "agg-rng"))
            self._cache: dict[Key, float] = {}
        else:
            self._nprng = np.random.default_rng(derive_seed(config.seed, "agg-rng-np"))
            self._avals = np.empty(self._m + 1, dtype=np.float64)
            self._keys: list[Key] = []
            self._slot_of: dict[Key, int] = {}

    # -- scalar implementation ----------------------------------------------

    def _observe_scalar(self, key: Key, size: float) -> None:
        cache = self._cache
        if key in cache:
            cache[key] += size
            return
        cache[key] = size
        self._insertions += 1
        if len(cache) > self._m:
            self._round_scalar()

    def _round_scalar(self) -> None:
        cache = self._cache
        expo = self._rng.expovariate
        evict_key: Key = None  # type: ignore[assignment]
        tau = -1.0
        for key, a in cache.items():
            rank = expo(1.0) / a
            if rank > tau:
                tau = rank
                evict_key = key
        del cache[evict_key]
        self._evictions += 1
        for key, a in cache.items():
            p = -math.expm1(-a * tau)
            if p > 0.0:  # guards underflow of a * tau; unreachable at sane scales
                cache[key] = a / p

    # -- vectorized implementation --------------------------------------------

    def _observe_vector(self, key: Key, size: float) -> None:
        slot = self._slot_of.get(key)
        if slot is not None:
            self._avals[slot] += size
            return
        slot = len(self._keys)
        self._avals[slot] = size
        self._keys.append(key)
        self._slot_of[key] = slot
        self._insertions += 1
        if slot + 1 > self._m:
            self._round_vector()

    def _round_vector(self) -> None:
        n = len(self._keys)  # == m + 1
        a = self._avals[:n]
        ranks = self._nprng.standard_exponential(n) / a
        vi = int(ranks.argmax())
        tau = float(ranks[vi])
        # Swap-delete the loser with the last slot.
        keys = self._keys
        last = n - 1
        moved = keys[last]
        del self._slot_of[keys[vi]]
        if vi != last:
            keys[vi] = moved
            self._avals[vi] = self._avals[last]
            self._slot_of[moved] = vi
        keys.pop()
        self._evictions += 1
        survivors = self._avals[:last]
        with np.errstate(divide="ignore"):
            survivors /= -np.expm1(-survivors * tau)

    # -- shared interface -----------------------------------------------------

    def observe(self, item: StreamItem | tuple[Key, float]) -> None:
        key, size = item
        size = check_item(key, size)
        self._items_processed += 1
        if self.round_impl == "scalar":
            self._observe_scalar(key, size)
        else:
            self._observe_vector(key, size)

    def query(self, key: Key) -> float:
        if self.round_impl == "scalar":
            return self._cache.get(key, 0.0)
        slot = self._slot_of.get(key)
        return float(self._avals[slot]) if slot is not None else 0.0

    def _pairs(self) -> Iterable[tuple[Key, float]]:
        if self.round_impl == "scalar":
            return self._cache.items()
        return ((k, float(self._avals[s])) for k, s in self._slot_of.items())

    def summary(self) -> Summary:
        return Summary.build(
            self._pairs(),
            self._m,
            self._items_processed,
            self._evictions,
            0,
        )


class PrioritySample(NamedTuple):
    """Result of batch priority sampling: retained estimates and threshold."""

    estimates: dict[Key, float]
    threshold: float


def priority_sample(
    aggregates: Sequence[tuple[Key, float]],
    m: int,
    *,
    u: Sequence[float] | None = None,
    seed: int = 0,
) -> PrioritySample:
    """Batch priority sampling of per-key aggregates.

    Each key i with weight x_i draws u_i uniform in (0, 1] and gets priority
    ``x_i / u_i``.  The m largest priorities are retained (ties broken by key
    fingerprint), the threshold z is the (m+1)-st largest priority (0 if
    nothing was dropped), and every retained key is estimated ``max(x_i, z)``.

    ``aggregates`` must have distinct keys — this is a batch estimator over
    per-key totals, not a stream consumer.  ``u`` may be passed explicitly
    (one value per aggregate, each in (0, 1]); otherwise randomizers are drawn
    from the same seeded stream an aggregator with ``seed`` would use, which
    is what makes it directly comparable to a reservoir run on a
    one-item-per-key stream.
    """
    n = len(aggregates)
    if m < 1:
        raise ValueError("m must be >= 1")
    if u is None:
        rng = Random(derive_seed(seed, "agg-rng"))
        u = [1.0 - rng.random() for _ in range(n)]
    elif len(u) != n:
        raise ValueError("u must have one value per aggregate")
    keys = []
    seen = set()
    fps = []
    prs = []
    for (key, x), ui in zip(aggregates, u):
        x = check_item(key, x)
        if not (0.0 < ui <= 1.0):
            raise ValueError(f"randomizers must lie in (0, 1], got {ui!r}")
        if key in seen:
            raise ValueError(f"duplicate key {key!r}; aggregate the stream first")
        seen.add(key)
        keys.append((key, x))
        fps.append(fingerprint64(key))
        prs.append(x / ui)
    order = sorted(range(n), key=lambda i: (prs[i], fps[i]), reverse=True)
    retained = order[:m]
    z = prs[order[m]] if n > m else 0.0
    estimates = {}
    for i in retained:
        key, x = keys[i]
        estimates[key] = x if x >= z else z
    return PrioritySample(estimates, z)
