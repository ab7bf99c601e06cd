"""Internal cluster-quality metrics: silhouette, Davies-Bouldin and the composite score."""
from typing import List, Sequence, Tuple

import numpy as np

from ...config.settings import COMPOSITE_WEIGHTS
from ...errors import UndefinedMetric
from ..embed.affinity import cosine_dissimilarity
from ..embed.models import EmbeddingMatrix

COINCIDENT_CENTROIDS = 1e-12


def _one_hot(assignment: Sequence[int]) -> Tuple[np.ndarray, np.ndarray]:
    labels = np.asarray(assignment, dtype=np.int64)
    k = int(labels.max()) + 1 if labels.size else 0
    membership = np.zeros((labels.size, k))
    membership[np.arange(labels.size), labels] = 1.0
    return labels, membership


def silhouette_samples(dist: np.ndarray, assignment: Sequence[int]) -> np.ndarray:
    """Per-sample silhouette over a precomputed dissimilarity matrix."""
    labels, membership = _one_hot(assignment)
    n, k = membership.shape
    if not 2 <= k <= n - 1:
        raise UndefinedMetric(f"silhouette needs 2 <= k <= n-1, got k={k}, n={n}")
    counts = membership.sum(axis=0)
    totals = dist @ membership
    rows = np.arange(n)
    own = counts[labels]
    with np.errstate(divide="ignore", invalid="ignore"):
        a = np.where(own > 1, totals[rows, labels] / (own - 1), 0.0)
        means = totals / counts
    means[rows, labels] = np.inf
    b = means.min(axis=1)
    denom = np.maximum(a, b)
    scores = np.zeros(n)
    defined = (own > 1) & (denom > 0)
    scores[defined] = (b[defined] - a[defined]) / denom[defined]
    return scores


def silhouette_stats(embeddings: EmbeddingMatrix, assignment: Sequence[int]) -> Tuple[float, float]:
    """Mean and standard deviation of per-sample silhouette values."""
    scores = silhouette_samples(cosine_dissimilarity(embeddings.vectors), assignment)
    return float(scores.mean()), float(scores.std())


def silhouette_score(embeddings: EmbeddingMatrix, assignment: Sequence[int]) -> float:
    return silhouette_stats(embeddings, assignment)[0]


def davies_bouldin_with_diagnostics(vectors: np.ndarray, assignment: Sequence[int]) -> Tuple[float, List[dict]]:
    """Davies-Bouldin index in Euclidean geometry, with coincident-centroid pairs reported."""
    _, membership = _one_hot(assignment)
    k = membership.shape[1]
    if k < 2:
        raise UndefinedMetric(f"Davies-Bouldin needs k >= 2, got k={k}")
    counts = membership.sum(axis=0)
    centroids = (membership.T @ vectors) / counts[:, None]
    labels = np.asarray(assignment, dtype=np.int64)
    spread = np.linalg.norm(vectors - centroids[labels], axis=1)
    dispersion = (membership.T @ spread) / counts
    separation = np.linalg.norm(centroids[:, None, :] - centroids[None, :, :], axis=2)

    diagnostics = []
    ratios = np.full((k, k), -np.inf)
    for i in range(k):
        for j in range(k):
            if i == j:
                continue
            if separation[i, j] < COINCIDENT_CENTROIDS:
                ratios[i, j] = np.inf
                if i < j:
                    diagnostics.append({"kind": "coincident_centroids", "clusters": [i, j]})
            else:
                ratios[i, j] = (dispersion[i] + dispersion[j]) / separation[i, j]
    return float(ratios.max(axis=1).mean()), diagnostics


def davies_bouldin(embeddings: EmbeddingMatrix, assignment: Sequence[int]) -> float:
    return davies_bouldin_with_diagnostics(embeddings.vectors, assignment)[0]


def composite_score(silhouette: float, davies_bouldin: float, k: int, n: int,
                    weights: Tuple[float, float, float] = COMPOSITE_WEIGHTS) -> float:
    w_sil, w_db, w_k = weights
    return (w_sil * (silhouette + 1.0) / 2.0
            + w_db * (1.0 / (1.0 + davies_bouldin))
            + w_k * (1.0 - k / n))
