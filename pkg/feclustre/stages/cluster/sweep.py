"""Threshold sweep over a dendrogram, scoring every cut."""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import List, Tuple

import numpy as np

from ...config.settings import COMPOSITE_WEIGHTS, SWEEP_START, SWEEP_STEP, SWEEP_STOP
from ...errors import ConfigError, SweepError, UndefinedMetric
from ..embed.affinity import cosine_dissimilarity
from ..embed.models import EmbeddingMatrix
from .cut import cut
from .metrics import composite_score, davies_bouldin_with_diagnostics, silhouette_samples
from .models import ClusteringCandidate, Dendrogram

logger = logging.getLogger(__name__)


class Linkage(str, Enum):
    AVERAGE = "average"
    SINGLE = "single"
    COMPLETE = "complete"
    WARD = "ward"


@dataclass(frozen=True)
class SweepConfig:
    start: float = SWEEP_START
    stop: float = SWEEP_STOP
    step: float = SWEEP_STEP
    linkage: Linkage = Linkage.AVERAGE
    max_workers: int = 4
    weights: Tuple[float, float, float] = COMPOSITE_WEIGHTS

    def validate(self) -> None:
        if Linkage(self.linkage) != Linkage.AVERAGE:
            raise ConfigError(f"linkage {Linkage(self.linkage).value!r} is not implemented; use 'average'")
        if self.step <= 0 or self.start < 0 or self.stop < self.start:
            raise ConfigError(f"invalid sweep range [{self.start}, {self.stop}] step {self.step}")

    def thresholds(self) -> List[float]:
        count = int(round((self.stop - self.start) / self.step)) + 1
        return [round(self.start + i * self.step, 10) for i in range(count)]


def evaluate_cut(dendrogram: Dendrogram, vectors: np.ndarray, dist: np.ndarray, threshold: float,
                 weights: Tuple[float, float, float] = COMPOSITE_WEIGHTS) -> ClusteringCandidate:
    assignment = cut(dendrogram, threshold)
    n = len(assignment)
    k = max(assignment) + 1
    sizes = tuple(int(s) for s in np.bincount(assignment, minlength=k))
    if not 2 <= k <= n - 1:
        return ClusteringCandidate(threshold=threshold, assignment=assignment, k=k, valid=False, cluster_sizes=sizes)
    try:
        scores = silhouette_samples(dist, assignment)
        db, diagnostics = davies_bouldin_with_diagnostics(vectors, assignment)
    except UndefinedMetric as e:
        logger.warning(f"Threshold {threshold}: {e}")
        return ClusteringCandidate(threshold=threshold, assignment=assignment, k=k, valid=False, cluster_sizes=sizes)
    silhouette = float(scores.mean())
    return ClusteringCandidate(
        threshold=threshold,
        assignment=assignment,
        k=k,
        valid=True,
        silhouette=silhouette,
        silhouette_std=float(scores.std()),
        davies_bouldin=db,
        composite=composite_score(silhouette, db, k, n, weights),
        cluster_sizes=sizes,
        diagnostics=diagnostics,
    )


def sweep(embeddings: EmbeddingMatrix, dendrogram: Dendrogram, config: SweepConfig = SweepConfig()) -> List[ClusteringCandidate]:
    """Evaluate every threshold of the sweep grid, ordered by threshold.

    Raises:
        SweepError: no threshold yields 2 <= k <= n-1.
    """
    config.validate()
    if dendrogram.n_leaves != embeddings.n:
        raise ConfigError(f"dendrogram has {dendrogram.n_leaves} leaves but {embeddings.n} embeddings were given")
    vectors = embeddings.vectors
    dist = cosine_dissimilarity(vectors)
    thresholds = config.thresholds()
    with ThreadPoolExecutor(max_workers=max(1, config.max_workers)) as pool:
        candidates = list(pool.map(lambda t: evaluate_cut(dendrogram, vectors, dist, t, config.weights), thresholds))
    valid = [c for c in candidates if c.valid]
    if not valid:
        raise SweepError(
            f"no threshold in [{config.start}, {config.stop}] produced 2 <= k <= n-1 for n={embeddings.n}; "
            f"override the sweep range"
        )
    logger.info(f"Swept {len(candidates)} thresholds, {len(valid)} valid candidates")
    return candidates
