"""Pluggable embedding providers.

Each provider maps a batch of texts to a raw (n, D) array; normalization is
applied afterwards by the embedder regardless of provider.
"""
import logging
from typing import Dict, Optional, Protocol, Sequence

import numpy as np

from ...config.settings import DEFAULT_EMBED_MODEL, DEFAULT_LOCAL_MODEL, HASHING_DIM
from ...errors import ConfigError, EmbeddingError
from .cache import read_vector_cache, write_vector_cache
from .hashing import hashing_embed
from .services.embedding_client import request_embeddings

try:
    from sentence_transformers import SentenceTransformer  # type: ignore
except Exception:
    SentenceTransformer = None  # type: ignore

logger = logging.getLogger(__name__)


class EmbeddingProvider(Protocol):
    tag: str

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        ...


class HashingProvider:
    def __init__(self, dim: int = HASHING_DIM, seed: int = 0):
        if dim < 8:
            raise ConfigError(f"hashing dimension must be >= 8, got {dim}")
        self.dim = dim
        self.seed = seed
        self.tag = f"hashing-d{dim}-s{seed}"

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        return np.vstack([hashing_embed(t, self.dim, self.seed) for t in texts])


class RemoteEmbeddingProvider:
    """OpenAI-compatible embeddings endpoint reached through litellm."""

    def __init__(self, model: str = DEFAULT_EMBED_MODEL, api_base: Optional[str] = None,
                 api_key: Optional[str] = None):
        self.model = model
        self.api_base = api_base
        self.api_key = api_key
        self.tag = f"remote-{model}"

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        return np.asarray(request_embeddings(texts, self.model, self.api_base, self.api_key), dtype=np.float64)


class SentenceTransformerProvider:
    """Local sentence-transformers model (e.g. all-MiniLM-L6-v2, sentence-t5-base)."""

    def __init__(self, model: str = DEFAULT_LOCAL_MODEL):
        if SentenceTransformer is None:
            raise ConfigError("sentence-transformers is not installed; use the hashing or remote provider")
        self.model = SentenceTransformer(model)
        self.tag = f"local-{model}"

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        return np.asarray(self.model.encode(list(texts), convert_to_numpy=True, show_progress_bar=False),
                          dtype=np.float64)


class CachedProvider:
    """Wraps a provider with a surface -> vector cache persisted as JSONL."""

    def __init__(self, inner: EmbeddingProvider, path: Optional[str] = None):
        self.inner = inner
        self.path = path
        self.tag = inner.tag
        self.vectors: Dict[str, np.ndarray] = {}
        if path:
            try:
                self.vectors = read_vector_cache(path)
                logger.info(f"Loaded {len(self.vectors)} cached vectors from {path}")
            except FileNotFoundError:
                pass

    def embed(self, texts: Sequence[str]) -> np.ndarray:
        missing = [t for t in dict.fromkeys(texts) if t not in self.vectors]
        if missing:
            fresh = self.inner.embed(missing)
            for text, vector in zip(missing, fresh):
                self.vectors[text] = np.asarray(vector, dtype=np.float64)
        dims = {self.vectors[t].shape[0] for t in texts}
        if len(dims) > 1:
            raise EmbeddingError(f"cached vectors have mixed dimensions {sorted(dims)}")
        return np.vstack([self.vectors[t] for t in texts])

    def save(self) -> None:
        if self.path:
            surfaces = sorted(self.vectors)
            write_vector_cache(self.path, surfaces, np.vstack([self.vectors[s] for s in surfaces]))


def build_provider(mode: str, *, dim: int = HASHING_DIM, seed: int = 0, model: Optional[str] = None,
                   endpoint: Optional[str] = None, cache_path: Optional[str] = None) -> EmbeddingProvider:
    if mode == "hashing":
        provider = HashingProvider(dim=dim, seed=seed)
    elif mode == "remote":
        provider = RemoteEmbeddingProvider(model=model or DEFAULT_EMBED_MODEL, api_base=endpoint)
    elif mode == "local":
        provider = SentenceTransformerProvider(model=model or DEFAULT_LOCAL_MODEL)
    else:
        raise ConfigError(f"unknown embedding provider mode {mode!r}")
    if cache_path:
        return CachedProvider(provider, cache_path)
    return provider
