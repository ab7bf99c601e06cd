"""Vector cache formats: JSONL records and the raw FECLV1 binary layout.

Binary layout: b"FECLV1", u32 n, u32 D, then n*D little-endian float32.
"""
import json
import struct
from pathlib import Path
from typing import Dict, Sequence, Tuple

import numpy as np

from ...errors import EmbeddingError

MAGIC = b"FECLV1"
HEADER = struct.Struct("<II")


def write_vector_cache(path, surfaces: Sequence[str], vectors: np.ndarray) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        for surface, vector in zip(surfaces, vectors):
            record = {"surface": surface, "vector": [float(x) for x in vector]}
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")


def read_vector_cache(path) -> Dict[str, np.ndarray]:
    vectors: Dict[str, np.ndarray] = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                vectors[record["surface"]] = np.asarray(record["vector"], dtype=np.float64)
            except (json.JSONDecodeError, KeyError, TypeError) as e:
                raise EmbeddingError(f"{path}:{lineno}: bad vector record ({e})") from e
    return vectors


def write_binary(path, vectors: np.ndarray) -> None:
    vectors = np.ascontiguousarray(vectors, dtype="<f4")
    n, dim = vectors.shape
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as handle:
        handle.write(MAGIC)
        handle.write(HEADER.pack(n, dim))
        handle.write(vectors.tobytes())


def read_binary(path) -> np.ndarray:
    data = Path(path).read_bytes()
    if data[:len(MAGIC)] != MAGIC:
        raise EmbeddingError(f"{path}: not a FECLV1 file")
    n, dim = HEADER.unpack_from(data, len(MAGIC))
    offset = len(MAGIC) + HEADER.size
    expected = offset + 4 * n * dim
    if len(data) != expected:
        raise EmbeddingError(f"{path}: expected {expected} bytes, found {len(data)}")
    return np.frombuffer(data, dtype="<f4", offset=offset).reshape(n, dim).astype(np.float64)


def read_embeddings(path) -> Tuple[Tuple[str, ...], np.ndarray]:
    """Ordered (ids, vectors) from a JSONL embeddings artifact."""
    vectors = read_vector_cache(path)
    ids = tuple(vectors)
    return ids, np.vstack([vectors[s] for s in ids])
