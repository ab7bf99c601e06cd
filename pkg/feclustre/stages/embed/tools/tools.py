import logging
from typing import Any, Dict, Optional

from ....errors import FeClustError
from ..cache import write_binary, write_vector_cache
from ..embedder import embed_features
from ..providers import CachedProvider, build_provider
from ...corpus.io import read_features

logger = logging.getLogger(__name__)


def embed_feature_file(features_path: str, output_path: str, mode: str = "hashing", dim: int = 256,
                       seed: int = 0, model: Optional[str] = None, endpoint: Optional[str] = None,
                       cache_path: Optional[str] = None, binary_path: Optional[str] = None) -> Dict[str, Any]:
    """
    Embed every feature surface of a features file.

    Args:
        features_path: Features JSONL
        output_path: Embeddings JSONL ({"surface", "vector"}) in feature order
        mode: Provider mode: hashing, remote or local
        dim: Hashing dimension
        seed: Hashing seed
        model: Remote or local model name
        endpoint: Remote embeddings API base
        cache_path: Optional JSONL vector cache reused across runs
        binary_path: Optional FECLV1 copy of the matrix

    Returns:
        Dict with status, provider tag and matrix shape
    """
    try:
        features, _ = read_features(features_path)
        provider = build_provider(mode, dim=dim, seed=seed, model=model, endpoint=endpoint, cache_path=cache_path)
        embeddings = embed_features(features, provider)
        write_vector_cache(output_path, embeddings.ids, embeddings.vectors)
        artifacts = [output_path]
        if binary_path:
            write_binary(binary_path, embeddings.vectors)
            artifacts.append(binary_path)
        if isinstance(provider, CachedProvider):
            provider.save()
        return {
            "status": "success",
            "message": f"embedded {embeddings.n} features (D={embeddings.dim})",
            "provider": embeddings.provider_tag,
            "shape": [embeddings.n, embeddings.dim],
            "artifacts": artifacts,
        }
    except FeClustError as e:
        logger.error(f"Embedding failed: {e}")
        failed = getattr(e, "failed", [])
        return {"status": "error", "message": f"Failed to embed features: {e}", "failed": failed}
    except OSError as e:
        logger.error(f"Embedding failed: {e}")
        return {"status": "error", "message": f"Failed to embed features: {e}"}
