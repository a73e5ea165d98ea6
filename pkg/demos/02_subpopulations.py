"""
Subpopulation queries over a stream summary
===========================================

A summary holds per-key estimates, so the estimated volume of any key
subset is just a sum.  Unbiased per-key errors partially cancel inside a
subset: the bigger the subset, the better the total.
"""

import random

from streamagg import AggregatorConfig, make_aggregator
from streamagg.metrics import subpop_wre
from streamagg.traces import exact_totals, gen_synthetic

items = gen_synthetic(5000, seed=3)
truth = exact_totals(items)

agg = make_aggregator(AggregatorConfig(capacity=400, mode="pbash", seed=21))
agg.observe_all(items)
summary = agg.summary()
est = summary.as_dict()

# Draw 200 random subpopulations of each size and average the relative
# error of their estimated totals.
rng = random.Random(99)
keys = sorted(truth)
print(f"{'subset size':>12} {'mean subpop WRE':>16}")
for size in (10, 30, 100, 300, 1000):
    errs = []
    for _ in range(200):
        subset = rng.sample(keys, size)
        errs.append(subpop_wre(est, truth, subset))
    print(f"{size:12d} {sum(errs) / len(errs):16.4f}")

# subset_sum on the Summary object does the same sum without building the
# intermediate dict — handy for one-off queries.
subset = keys[: len(keys) // 2]
print(f"\nfirst-half volume: true {sum(truth[k] for k in subset):.0f}, "
      f"estimated {summary.subset_sum(subset):.0f}")
