"""Deterministic character n-gram hashing embedder for offline runs."""
import hashlib
from collections import Counter

import numpy as np

from ...errors import ConfigError

NGRAM = 3
PAD = "#"


def char_ngrams(surface: str, n: int = NGRAM) -> Counter:
    padded = f"{PAD}{surface}{PAD}"
    if len(padded) < n:
        return Counter([padded])
    return Counter(padded[i:i + n] for i in range(len(padded) - n + 1))


def _bucket(gram: str, dim: int, seed: int):
    digest = hashlib.blake2b(f"{seed}\x1f{gram}".encode("utf-8"), digest_size=8).digest()
    index = int.from_bytes(digest[:4], "little") % dim
    sign = 1.0 if digest[4] & 1 == 0 else -1.0
    return index, sign


def hashing_embed(surface: str, dim: int = 256, seed: int = 0) -> np.ndarray:
    """Signed feature hashing of padded character 3-grams, L2-normalized."""
    if dim < 8:
        raise ConfigError(f"hashing dimension must be >= 8, got {dim}")
    vector = np.zeros(dim, dtype=np.float64)
    for gram, count in sorted(char_ngrams(surface).items()):
        index, sign = _bucket(gram, dim, seed)
        vector[index] += sign * count
    norm = np.linalg.norm(vector)
    if norm == 0:
        # every gram cancelled out; fall back to the whole surface
        index, sign = _bucket(surface, dim, seed)
        vector[index] = sign
        norm = 1.0
    return vector / norm
