import logging
from typing import Any, Dict

from ....errors import FeClustError
from ..linkage import average_linkage
from ..report import write_candidates, write_dendrogram
from ..sweep import Linkage, SweepConfig, sweep
from ...embed.affinity import affinity
from ...embed.cache import read_embeddings
from ...embed.models import EmbeddingMatrix

logger = logging.getLogger(__name__)


def cluster_embeddings(embeddings_path: str, dendrogram_path: str, candidates_path: str,
                       linkage: str = "average", start: float = 0.10, stop: float = 0.90,
                       step: float = 0.05, max_workers: int = 4) -> Dict[str, Any]:
    """
    Build the dendrogram and sweep cut thresholds over it.

    Args:
        embeddings_path: Embeddings JSONL
        dendrogram_path: Where the dendrogram JSON goes
        candidates_path: Where the candidate report goes
        linkage: Linkage method (only "average")
        start: First threshold
        stop: Last threshold
        step: Threshold step
        max_workers: Threads evaluating thresholds

    Returns:
        Dict with status and candidate counts
    """
    try:
        config = SweepConfig(start=start, stop=stop, step=step, linkage=Linkage(linkage), max_workers=max_workers)
        config.validate()
        ids, vectors = read_embeddings(embeddings_path)
        embeddings = EmbeddingMatrix(ids=ids, vectors=vectors, provider_tag="file")
        dendrogram = average_linkage(affinity(embeddings))
        write_dendrogram(dendrogram_path, dendrogram)
        candidates = sweep(embeddings, dendrogram, config)
        write_candidates(candidates_path, candidates)
        valid = [c for c in candidates if c.valid]
        return {
            "status": "success",
            "message": f"{len(valid)} of {len(candidates)} thresholds gave valid clusterings",
            "candidates": len(candidates),
            "valid": len(valid),
            "artifacts": [dendrogram_path, candidates_path],
        }
    except (FeClustError, OSError, ValueError) as e:
        logger.error(f"Clustering failed: {e}")
        return {"status": "error", "message": f"Failed to cluster features: {e}"}
