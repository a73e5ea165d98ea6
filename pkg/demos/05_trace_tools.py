"""
Building, saving, and mixing traces
===================================

The trace tools generate synthetic streams, round-trip them through CSV,
and interleave several traces with controlled byte shares per window —
useful for emulating one traffic class flooding another.
"""

import tempfile
from pathlib import Path

from streamagg.traces import (
    exact_totals,
    gen_synthetic,
    mix_traces,
    read_csv_trace,
    write_csv_trace,
)

# Two very different streams: a broad heavy-tailed one and a small, intense
# one (few keys, many items) standing in for attack traffic.
legit = gen_synthetic(2000, seed=10)
attack = gen_synthetic(50, seed=11)
attack = [(f"atk{key}", size) for key, size in attack] * 8
print(f"legit: {len(legit)} items / {len(exact_totals(legit))} keys")
print(f"attack: {len(attack)} items / {len(exact_totals(attack))} keys")

# Interleave them 60/40 by volume in windows of 500 items.  Within each
# source the original item order is preserved.
mixed = mix_traces([legit, attack], fractions=[0.6, 0.4], window_items=500, seed=4)
vol_attack = sum(size for key, size in mixed if str(key).startswith("atk"))
vol_total = sum(size for _, size in mixed)
print(f"mixed: {len(mixed)} items, attack share {vol_attack / vol_total:.1%}")

# CSV round-trip.  The plain schema is two columns; keys come back as
# strings, which is fine for aggregation purposes.
path = Path(tempfile.mkdtemp()) / "mixed.csv"
write_csv_trace(mixed, path)
back = read_csv_trace(path)
print(f"wrote {path.stat().st_size} bytes, read back {len(back)} items")
print("first rows:", back[:3])
