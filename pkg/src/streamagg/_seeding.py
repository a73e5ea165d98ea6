"""Deterministic derivation of independent random substreams.

Experiments need many mutually independent RNG streams (one per trial, per
algorithm, per purpose) that are all reproducible from a single base seed.
Deriving them by hashing ``(base, label, index)`` through a strong 64-bit
mixer avoids the classic pitfall of correlated streams from ``seed + i``.
"""

from __future__ import annotations

import hashlib

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def mix64(x: int) -> int:
    """Finalizing 64-bit mixer (splitmix64 finalizer).

    Bijective on 64-bit integers, so distinct inputs never collide.
    """
    x &= MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return (x ^ (x >> 31)) & MASK64


def _salt_to_int(salt: int | str) -> int:
    if isinstance(salt, int):
        return salt & MASK64
    digest = hashlib.blake2b(salt.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def derive_seed(base: int, *salts: int | str) -> int:
    """Derive a 64-bit seed from ``base`` and a sequence of labels/indices.

    The same arguments always give the same seed; any change to any salt
    gives an unrelated one.
    """
    h = mix64(base & MASK64)
    for salt in salts:
        h = mix64((h + _GOLDEN + _salt_to_int(salt)) & MASK64)
    return h
