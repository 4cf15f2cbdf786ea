"""Offline text embedding: hashed character-trigram counts."""

from __future__ import annotations

import hashlib
from functools import lru_cache

import numpy as np

DIM = 256


def _bucket(gram: str) -> int:
    digest = hashlib.blake2b(gram.encode("utf-8"), digest_size=4).digest()
    return int.from_bytes(digest, "little") % DIM


def trigrams(text: str) -> list[str]:
    text = text.lower()
    if len(text) < 3:
        return [text] if text else []
    return [text[i : i + 3] for i in range(len(text) - 2)]


@lru_cache(maxsize=65536)
def _embed_cached(text: str) -> bytes:
    vec = np.zeros(DIM, dtype=np.float64)
    for g in trigrams(text):
        vec[_bucket(g)] += 1.0
    norm = np.linalg.norm(vec)
    if norm > 0:
        vec /= norm
    return vec.tobytes()


def trigram_embedding(text: str) -> np.ndarray:
    """L2-normalised 256-dim trigram histogram; the zero vector for empty text."""
    return np.frombuffer(_embed_cached(text), dtype=np.float64).copy()
