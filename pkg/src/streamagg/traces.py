"""Trace tooling: synthetic workloads, CSV round-trips, and trace mixing.

A trace is just a list of :class:`~streamagg.model.StreamItem`.  The
synthetic generator produces the classic heavy-tailed workload (per-key item
counts Pareto-distributed, unit item sizes) whose handful of elephant keys
and ocean of single-item keys is exactly the regime fixed-size aggregators
are built for.  The mixer interleaves several traces so that each window of
the output carries prescribed byte-volume shares per source — useful for
emulating an attack trace overlaid on a baseline workload.
"""

from __future__ import annotations

import csv
import math
from random import Random
from typing import Iterable, Sequence

from .model import Key, StreamItem, check_item

_KV_HEADER = ["key", "size"]
_FLOW_HEADER = ["src_ip", "dst_ip", "src_port", "dst_port", "protocol", "bytes"]


def gen_synthetic(
    num_keys: int,
    alpha: float = 1.2,
    seed: int = 0,
    x_min: float = 1.0,
    shuffle: bool = True,
    key_base: int = 0,
) -> list[StreamItem]:
    """Heavy-tailed synthetic trace: per-key counts ~ Pareto(alpha), unit sizes.

    Key k in ``[key_base, key_base + num_keys)`` receives
    ``ceil(x_min * U**(-1/alpha))`` unit-size items, U uniform in (0, 1].
    With ``shuffle`` the items are randomly interleaved (same rng), otherwise
    each key's items arrive consecutively — maximally friendly to
    pre-aggregation, which is occasionally what one wants to isolate.
    """
    if num_keys < 1:
        raise ValueError("num_keys must be >= 1")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    rng = Random(seed)
    inv_alpha = -1.0 / alpha
    items: list[StreamItem] = []
    for k in range(key_base, key_base + num_keys):
        count = math.ceil(x_min * (1.0 - rng.random()) ** inv_alpha)
        item = StreamItem(k, 1.0)
        items.extend([item] * count)
    if shuffle:
        rng.shuffle(items)
    return items


def exact_totals(items: Iterable[StreamItem | tuple[Key, float]]) -> dict[Key, float]:
    """True per-key total sizes of a trace."""
    totals: dict[Key, float] = {}
    for key, size in items:
        if key in totals:
            totals[key] += size
        else:
            totals[key] = float(size)
    return totals


def write_csv_trace(items: Iterable[StreamItem | tuple[Key, float]], path: str) -> None:
    """Write a trace as ``key,size`` CSV (keys stringified)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_KV_HEADER)
        for key, size in items:
            writer.writerow([key, repr(float(size))])


def read_csv_trace(path: str) -> list[StreamItem]:
    """Read a trace from CSV.

    Two schemas are recognized by header:

      * ``key,size`` — keys are kept as strings, sizes parsed as floats.
      * ``src_ip,dst_ip,src_port,dst_port,protocol,bytes`` — the five flow
        fields are joined with ``|`` into one key; ``bytes`` is the size.

    Sizes must be positive and finite.
    """
    items: list[StreamItem] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header == _KV_HEADER:
            key_of = lambda row: row[0]
            size_col = 1
        elif header == _FLOW_HEADER:
            key_of = lambda row: "|".join(row[:5])
            size_col = 5
        else:
            raise ValueError(
                f"unrecognized trace header {header!r}; expected "
                f"{','.join(_KV_HEADER)} or {','.join(_FLOW_HEADER)}"
            )
        width = len(header)
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != width:
                raise ValueError(f"{path}:{lineno}: expected {width} fields, got {len(row)}")
            key = key_of(row)
            size = check_item(key, float(row[size_col]))
            items.append(StreamItem(key, size))
    return items


def _window_quotas(
    shares: Sequence[float], sizes: Sequence[float], window_items: int
) -> list[int]:
    # Translate byte-volume shares into per-source item quotas for one window,
    # using each source's mean item size; largest-remainder rounding keeps the
    # quota sum exactly at window_items.
    budget = window_items * math.fsum(f * s for f, s in zip(shares, sizes))
    raw = [shares[i] * budget / sizes[i] if sizes[i] > 0 else 0.0 for i in range(len(shares))]
    scale = window_items / math.fsum(raw) if math.fsum(raw) > 0 else 0.0
    raw = [r * scale for r in raw]
    quotas = [int(r) for r in raw]
    remainders = sorted(
        range(len(raw)), key=lambda i: raw[i] - quotas[i], reverse=True
    )
    short = window_items - sum(quotas)
    for i in remainders[:short]:
        quotas[i] += 1
    return quotas


def mix_traces(
    traces: Sequence[Sequence[StreamItem | tuple[Key, float]]],
    fractions: Sequence[float] | str | None = None,
    window_items: int = 1000,
    seed: int = 0,
    total_items: int | None = None,
    cycle: bool = True,
) -> list[StreamItem]:
    """Interleave traces with per-window byte-volume shares.

    Args:
        traces: source traces; each source's internal item order is preserved.
        fractions: byte-volume share per source (normalized), ``"random"``
            for fresh random shares every window, or None for equal shares.
        window_items: output window length in items.
        seed: randomizer for interleaving (and shares in ``"random"`` mode).
        total_items: output length; defaults to the summed source lengths.
        cycle: restart exhausted sources from their beginning (an "attack
            loop"); with ``cycle=False`` exhausted sources just drop out of
            their windows.

    Within each window the per-source item quotas are set from the requested
    byte shares and the sources' mean item sizes, then shuffled uniformly, so
    volume shares hold per window while the fine-grained order stays random.
    """
    k = len(traces)
    if k < 1:
        raise ValueError("need at least one trace")
    if any(len(t) == 0 for t in traces):
        raise ValueError("empty source trace")
    if window_items < 1:
        raise ValueError("window_items must be >= 1")
    random_shares = fractions == "random"
    if fractions is None or random_shares:
        shares = [1.0 / k] * k
    else:
        if len(fractions) != k or any(f < 0 for f in fractions) or sum(fractions) <= 0:
            raise ValueError("fractions must be nonnegative, one per trace, not all zero")
        total = math.fsum(fractions)
        shares = [f / total for f in fractions]

    rng = Random(seed)
    mean_sizes = [math.fsum(float(s) for _, s in t) / len(t) for t in traces]
    if total_items is None:
        total_items = sum(len(t) for t in traces)
    cursors = [0] * k
    exhausted = [False] * k
    out: list[StreamItem] = []
    while len(out) < total_items:
        if random_shares:
            draws = [rng.random() + 1e-9 for _ in range(k)]
            total = math.fsum(draws)
            shares = [d / total for d in draws]
        window = min(window_items, total_items - len(out))
        active = [i for i in range(k) if cycle or not exhausted[i]]
        if not active:
            break
        act_shares = [shares[i] for i in active]
        total = math.fsum(act_shares)
        if total <= 0:
            act_shares = [1.0 / len(active)] * len(active)
        else:
            act_shares = [s / total for s in act_shares]
        quotas = _window_quotas(act_shares, [mean_sizes[i] for i in active], window)
        labels: list[int] = []
        for src, quota in zip(active, quotas):
            labels.extend([src] * quota)
        rng.shuffle(labels)
        for src in labels:
            trace = traces[src]
            pos = cursors[src]
            if pos >= len(trace):
                exhausted[src] = True
                if not cycle:
                    continue
                pos = 0
            key, size = trace[pos]
            cursors[src] = pos + 1
            out.append(StreamItem(key, float(size)))
    return out
