"""Priority-based aggregation behind a sample-and-hold admission gate.

Plain priority-based aggregation admits every previously-unseen key into the
reservoir and lets the priority competition evict something.  Under skewed
traffic most of those admissions are single-item keys that are evicted almost
immediately, so the reservoir churns.  This variant screens newcomers first
with a sample-and-hold test against the running discard threshold ``z*``: a
new key carrying size ``x`` enters the competition only with probability
``min(1, x / z*)``.  A key that passes the gate is credited ``max(x, z*)``,
the standard unbiased correction for having survived a threshold-``z*`` test,
and from then on behaves exactly like any other reservoir entry.

The gate leaves per-key estimates unbiased while roughly halving reservoir
insertions; the error-filtered variant (``pbash_ef``) additionally drops the
``max(x, z*)`` admission credit, giving up unbiasedness for much lower error
on small and mid-size keys.
"""

from __future__ import annotations

from .model import AggregatorConfig, Key
from .pba import PbaAggregator


class PbashAggregator(PbaAggregator):
    """Sample-and-hold-gated priority aggregation (modes pbash / pbash_ef)."""

    _MODES = ("pbash", "pbash_ef")

    def _admit_new(self, key: Key, fp: int, x: float) -> None:
        z = self._zstar
        if z > 0.0 and self._rng.random() >= x / z:
            self._rejections += 1
            return
        super()._admit_new(key, fp, x)

    def _initial_scaled(self, x: float) -> float:
        return max(x, self._zstar)
