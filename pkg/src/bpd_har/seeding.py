"""Deterministic seed derivation and content fingerprints."""

from __future__ import annotations

import hashlib
from collections.abc import Iterable, Mapping
from datetime import datetime, timezone

import numpy as np


def hash_chunks(chunks: Iterable[bytes]) -> str:
    digest = hashlib.sha256()
    for chunk in chunks:
        digest.update(chunk)
    return digest.hexdigest()


def combined_seed(*parts: object) -> int:
    """Stable 63-bit seed derived from any printable parts, e.g. (seed, "epoch", 3)."""
    digest = hash_chunks(str(part).encode("utf-8") + b"\x1f" for part in parts)
    return int(digest[:16], 16) >> 1


def rng_for(*parts: object) -> np.random.Generator:
    return np.random.default_rng(combined_seed(*parts))


def fingerprint_array(values: np.ndarray) -> str:
    """Hash of an array's dtype, shape and raw bytes."""
    arr = np.ascontiguousarray(values)
    return hash_chunks((str(arr.dtype).encode(), str(arr.shape).encode(), arr.tobytes()))


def fingerprint_arrays(arrays: Mapping[str, np.ndarray]) -> dict[str, str]:
    return {name: fingerprint_array(arr) for name, arr in sorted(arrays.items())}


def utcnow() -> datetime:
    return datetime.now(timezone.utc)
