from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ...errors import EmbeddingError

NORM_TOLERANCE = 1e-6


@dataclass(frozen=True, eq=False)
class EmbeddingMatrix:
    """One unit-norm row per feature surface, in feature-set order."""

    ids: Tuple[str, ...]
    vectors: np.ndarray
    provider_tag: str

    def __post_init__(self):
        vectors = np.asarray(self.vectors, dtype=np.float64)
        if vectors.ndim != 2 or vectors.shape[0] != len(self.ids):
            raise EmbeddingError(f"expected {len(self.ids)} rows, got shape {vectors.shape}")
        if vectors.shape[1] < 2:
            raise EmbeddingError("embedding dimension must be at least 2")
        if not np.all(np.isfinite(vectors)):
            raise EmbeddingError("embedding matrix contains NaN or Inf")
        norms = np.linalg.norm(vectors, axis=1)
        if np.any(np.abs(norms - 1.0) > NORM_TOLERANCE):
            raise EmbeddingError("embedding rows must have unit L2 norm")
        object.__setattr__(self, "vectors", vectors)
        object.__setattr__(self, "ids", tuple(self.ids))

    @property
    def n(self) -> int:
        return len(self.ids)

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def index(self) -> dict:
        return {surface: row for row, surface in enumerate(self.ids)}


@dataclass(frozen=True, eq=False)
class AffinityMatrix:
    """Symmetric cosine dissimilarity with an exact zero diagonal."""

    dist: np.ndarray
    metric_tag: str = "cosine"

    @property
    def n(self) -> int:
        return self.dist.shape[0]


def normalize_rows(vectors: np.ndarray) -> np.ndarray:
    vectors = np.asarray(vectors, dtype=np.float64)
    norms = np.linalg.norm(vectors, axis=1, keepdims=True)
    if np.any(norms == 0) or not np.all(np.isfinite(norms)):
        raise EmbeddingError("cannot normalize zero or non-finite embedding rows")
    return vectors / norms
