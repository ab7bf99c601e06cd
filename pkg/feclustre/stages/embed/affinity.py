import logging

import numpy as np

from ...config.settings import MAX_AFFINITY_SIZE
from ...errors import AffinityTooLarge
from .models import AffinityMatrix, EmbeddingMatrix

logger = logging.getLogger(__name__)


def cosine_dissimilarity(vectors: np.ndarray) -> np.ndarray:
    """Symmetric 1 - <v_i, v_j> clipped to [0, 2] with a zero diagonal."""
    dist = 1.0 - vectors @ vectors.T
    dist = (dist + dist.T) / 2.0
    np.clip(dist, 0.0, 2.0, out=dist)
    np.fill_diagonal(dist, 0.0)
    return dist


def affinity(embeddings: EmbeddingMatrix, max_size: int = MAX_AFFINITY_SIZE) -> AffinityMatrix:
    """Dense cosine dissimilarity 1 - <v_i, v_j> over unit rows."""
    n = embeddings.n
    if n > max_size:
        raise AffinityTooLarge(
            f"{n} features exceed the dense affinity bound of {max_size}; "
            f"draw a stratified sample first (see the `sample` command)"
        )
    return AffinityMatrix(dist=cosine_dissimilarity(embeddings.vectors))
