"""On-disk cache for large intermediate arrays, keyed by a content hash.

The cache only stores arrays whose size reaches ``min_bytes``; a hit returns
exactly the array that was stored, so caching never changes results.
"""
from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path
from typing import Callable

import numpy as np

__all__ = ["ArrayCache", "CACHE_ENV", "content_key"]

CACHE_ENV = "CESARO_CACHE_DIR"


def content_key(tag: str, params: dict, *arrays) -> str:
    """sha256 over the tag, the JSON-encoded parameters and the raw bytes of ``arrays``."""
    h = hashlib.sha256()
    h.update(tag.encode())
    h.update(json.dumps(params, sort_keys=True, default=repr).encode())
    for a in arrays:
        a = np.ascontiguousarray(a)
        h.update(str(a.dtype).encode())
        h.update(str(a.shape).encode())
        h.update(a.tobytes())
    return h.hexdigest()


class ArrayCache:
    """Directory of ``<key>.npy`` files; ``directory=None`` disables caching."""

    def __init__(self, directory: str | os.PathLike | None = None, min_bytes: int = 1 << 20):
        self.directory = Path(directory) if directory else None
        self.min_bytes = min_bytes
        if self.directory is not None:
            self.directory.mkdir(parents=True, exist_ok=True)

    @classmethod
    def from_env(cls, directory=None) -> "ArrayCache":
        return cls(directory or os.environ.get(CACHE_ENV) or None)

    def fetch(self, tag: str, params: dict, inputs: tuple, compute: Callable[[], np.ndarray]) -> np.ndarray:
        if self.directory is None:
            return compute()
        path = self.directory / f"{content_key(tag, params, *inputs)}.npy"
        if path.exists():
            return np.load(path)
        out = compute()
        if out.nbytes >= self.min_bytes:
            tmp = path.with_suffix(".tmp.npy")
            np.save(tmp, out)
            os.replace(tmp, path)
        return out
