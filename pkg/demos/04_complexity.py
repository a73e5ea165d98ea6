"""
Per-item cost as the cache grows
================================

The adaptive sample-and-hold baseline pays a Theta(m) deletion round every
time a new key forces an eviction.  The priority-based reservoirs do the
same job with one O(log m) heap operation, so their per-item time barely
moves as the cache grows.
"""

from streamagg.harness import bench_experiment, fit_power_law, mean_of
from streamagg.traces import gen_synthetic

items = gen_synthetic(4000, seed=1)
grid = (50, 100, 200, 400)
rows = bench_experiment(("pba", "pbash", "ash"), items, grid, seed=2)

print(f"trace: {len(items)} items, cache sizes {list(grid)}")
print(f"\n{'mode':<7}" + "".join(f" m={m:<5d}" for m in grid) + "  time ~ m^e")
for mode in ("pba", "pbash", "ash"):
    times = [mean_of(rows, mode, "per_item_us", m) for m in grid]
    exp = fit_power_law(grid, times)
    print(f"{mode:<7}" + "".join(f" {t:6.2f} " for t in times) + f"  e = {exp:.2f}")
print("(per-item microseconds)")

# Insertions tell the same story from a different angle: the sample-and-hold
# gate in front of pbash admits far fewer keys into the reservoir, which is
# exactly the work the heap never has to do.
print(f"\n{'mode':<7}" + "".join(f" m={m:<7d}" for m in grid))
for mode in ("pba", "pbash", "ash"):
    ins = [int(mean_of(rows, mode, "insertions", m)) for m in grid]
    print(f"{mode:<7}" + "".join(f" {n:8d} " for n in ins))
print("(reservoir insertions)")
