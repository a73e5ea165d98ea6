"""Independent eager-update reference for the priority reservoir modes.

Applies the inclusion-probability clamp to *every* resident key at *every*
discard event (the schedule the deferred implementation is supposed to be
equivalent to), uses plain dicts and linear scans instead of the hash-heap,
and keeps its own bookkeeping code.  Only the seed derivation, fingerprints
and the raw RNG draw order are shared with the library — they define which
random stream is being sampled, not how the algorithm processes it.
"""

from __future__ import annotations

from fractions import Fraction
from random import Random

from streamagg._seeding import derive_seed
from streamagg.model import fingerprint64


class _Ent:
    __slots__ = ("w", "u", "scaled", "cw", "cz")

    def __init__(self, w, u, scaled):
        self.w = w
        self.u = u
        self.scaled = scaled
        self.cw = 0.0
        self.cz = 0.0


def _clamp(e: _Ent, z: float) -> None:
    # Keep the (w, z) pair with the smallest exact ratio; float cross-products
    # decide unless they tie, then exact rationals.
    if z <= 0.0:
        return
    if e.cz == 0.0:
        if e.w < z:
            e.cw, e.cz = e.w, z
        return
    left = e.w * e.cz
    right = e.cw * z
    if left > right:
        return
    if left == right and not (Fraction(e.w) * Fraction(e.cz) < Fraction(e.cw) * Fraction(z)):
        return
    e.cw, e.cz = e.w, z


def _q(e: _Ent) -> float:
    return 1.0 if e.cz == 0.0 else e.cw / e.cz


def _estimate(e: _Ent) -> float:
    return e.scaled if e.cz == 0.0 else (e.scaled / e.cw) * e.cz


class EagerReference:
    """Eager-schedule reservoir aggregation (pba / pba_ef / pbash / pbash_ef)."""

    def __init__(self, capacity: int, mode: str, seed: int):
        assert mode in ("pba", "pba_ef", "pbash", "pbash_ef")
        self.m = capacity
        self.mode = mode
        self.ef = mode.endswith("_ef")
        self.gated = mode.startswith("pbash")
        self.rng = Random(derive_seed(seed, "agg-rng"))
        self.z = 0.0
        self.entries: dict = {}  # key -> _Ent
        self.fps: dict = {}  # key -> fingerprint
        self.buf_key = None
        self.buf_size = 0.0

    # The eager schedule: at every discard event, immediately clamp every
    # resident entry with the updated running threshold.
    def _discard(self, priority: float) -> None:
        if priority > self.z:
            self.z = priority
        for e in self.entries.values():
            _clamp(e, self.z)

    def _min_key(self):
        # Linear scan, deliberately not a heap: ties broken by fingerprint.
        best = None
        best_key = None
        for key, e in self.entries.items():
            cand = (e.w / e.u, self.fps[key])
            if best is None or cand < best:
                best = cand
                best_key = key
        return best_key, best

    def _ingest(self, key, x: float) -> None:
        if key in self.entries:
            e = self.entries[key]
            _clamp(e, self.z)  # no-op under the eager schedule; mirrors the touch
            e.scaled += x * _q(e)
            e.w += x
            return
        if self.gated and self.z > 0.0 and self.rng.random() >= x / self.z:
            return
        u = 1.0 - self.rng.random()
        fp = fingerprint64(key)
        if self.gated:
            scaled0 = 0.0 if self.ef else max(x, self.z)
        else:
            scaled0 = 0.0 if self.ef else x
        if len(self.entries) < self.m:
            self.entries[key] = _Ent(x, u, scaled0)
            self.fps[key] = fp
            return
        min_key, min_rank = self._min_key()
        if (x / u, fp) < min_rank:
            self._discard(x / u)
            return
        evicted = self.entries.pop(min_key)
        self.fps.pop(min_key)
        self.entries[key] = _Ent(x, u, scaled0)
        self.fps[key] = fp
        self._discard(evicted.w / evicted.u)

    def observe(self, key, size: float) -> None:
        if self.buf_key is not None:
            if self.buf_key == key:
                self.buf_size += size
                return
            self._ingest(self.buf_key, self.buf_size)
        self.buf_key = key
        self.buf_size = size

    def _flush(self) -> None:
        if self.buf_key is not None:
            key, size = self.buf_key, self.buf_size
            self.buf_key = None
            self.buf_size = 0.0
            self._ingest(key, size)

    def query(self, key) -> float:
        self._flush()
        e = self.entries.get(key)
        if e is None:
            return 0.0
        _clamp(e, self.z)
        return _estimate(e)

    def estimates(self) -> dict:
        self._flush()
        out = {}
        for key, e in self.entries.items():
            _clamp(e, self.z)
            out[key] = _estimate(e)
        return out

    @property
    def threshold(self) -> float:
        return self.z
