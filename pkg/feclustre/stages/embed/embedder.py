"""Batch embedding with bounded fan-out, retries and normalization."""
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from typing import List, Sequence, Tuple

import numpy as np

from ...config.settings import BACKOFF_SECONDS, EMBED_BATCH_SIZE, EMBED_MAX_WORKERS, EMBED_RETRIES
from ...errors import EmbeddingError
from ..corpus.models import FeatureSet
from .models import EmbeddingMatrix, normalize_rows
from .providers import EmbeddingProvider

logger = logging.getLogger(__name__)


def _embed_batch(provider: EmbeddingProvider, batch: Sequence[str], retries: int, backoff: float):
    last_error = None
    for attempt in range(retries + 1):
        try:
            vectors = np.asarray(provider.embed(batch), dtype=np.float64)
            if vectors.ndim != 2 or vectors.shape[0] != len(batch):
                raise EmbeddingError(f"provider returned shape {vectors.shape} for {len(batch)} texts")
            return vectors, None
        except Exception as e:  # retried, then reported with the batch surfaces
            last_error = e
            logger.warning(f"Embedding batch attempt {attempt + 1}/{retries + 1} failed: {e}")
            if attempt < retries:
                time.sleep(backoff * 2 ** attempt)
    return None, last_error


def embed_texts(texts: Sequence[str], provider: EmbeddingProvider,
                batch_size: int = EMBED_BATCH_SIZE,
                retries: int = EMBED_RETRIES,
                max_workers: int = EMBED_MAX_WORKERS,
                backoff: float = BACKOFF_SECONDS) -> np.ndarray:
    """Embed texts into unit rows, in input order.

    Raises:
        EmbeddingError: a batch failed after retries (with the failed texts) or
            batches disagree on dimension.
    """
    texts = list(texts)
    if not texts:
        raise EmbeddingError("nothing to embed")
    batches: List[List[str]] = [texts[i:i + batch_size] for i in range(0, len(texts), batch_size)]
    with ThreadPoolExecutor(max_workers=max(1, max_workers)) as pool:
        results: List[Tuple] = list(pool.map(lambda b: _embed_batch(provider, b, retries, backoff), batches))
    failed = [text for batch, (vectors, _) in zip(batches, results) if vectors is None for text in batch]
    if failed:
        errors = "; ".join(sorted({str(e) for _, e in results if e is not None}))
        raise EmbeddingError(f"{len(failed)} texts failed to embed: {errors}", failed=failed)
    dims = {vectors.shape[1] for vectors, _ in results}
    if len(dims) > 1:
        raise EmbeddingError(f"embedding dimension mismatch across batches: {sorted(dims)}")
    return normalize_rows(np.vstack([vectors for vectors, _ in results]))


def embed_features(features: FeatureSet, provider: EmbeddingProvider, **kwargs) -> EmbeddingMatrix:
    """One unit row per unique feature surface, in feature-set order."""
    surfaces = list(dict.fromkeys(features.surfaces))
    if not surfaces:
        raise EmbeddingError("feature set is empty")
    vectors = embed_texts(surfaces, provider, **kwargs)
    logger.info(f"Embedded {len(surfaces)} features with {provider.tag} (D={vectors.shape[1]})")
    return EmbeddingMatrix(ids=tuple(surfaces), vectors=vectors, provider_tag=provider.tag)
