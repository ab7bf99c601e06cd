"""Single-pass, similarity-gated merging of mini-taxonomies."""
import logging
from dataclasses import replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ...errors import ConfigError
from ..embed.embedder import embed_texts
from ..embed.providers import EmbeddingProvider
from .models import NodeKind, Taxonomy

logger = logging.getLogger(__name__)

BELOW_ONE = float(np.nextafter(1.0, 0.0))


def label_similarity(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity of unit label vectors clamped to [0, 1].

    Exactly 1.0 only for bit-identical vectors.
    """
    if np.array_equal(u, v):
        return 1.0
    return float(min(max(float(np.dot(u, v)), 0.0), BELOW_ONE))


def embed_root_labels(taxonomies: Sequence[Taxonomy], provider: EmbeddingProvider) -> List[Taxonomy]:
    missing = [i for i, t in enumerate(taxonomies) if t.root_label_embedding is None]
    if not missing:
        return list(taxonomies)
    vectors = embed_texts([taxonomies[i].label for i in missing], provider)
    embedded = list(taxonomies)
    for row, i in enumerate(missing):
        embedded[i] = replace(taxonomies[i], root_label_embedding=vectors[row])
    return embedded


def scored_pairs(taxonomies: Sequence[Taxonomy], sigma: float) -> List[Tuple[float, int, int]]:
    """Pairs at or above sigma, in processing order.

    Order: similarity descending, then the rank of the larger member, the rank
    of the smaller member, then indices.
    """
    pairs = []
    for i in range(len(taxonomies)):
        for j in range(i + 1, len(taxonomies)):
            sim = label_similarity(taxonomies[i].root_label_embedding, taxonomies[j].root_label_embedding)
            if sim >= sigma:
                first, second = sorted((taxonomies[i].rank(), taxonomies[j].rank()))
                pairs.append((-sim, first, second, i, j))
    pairs.sort()
    return [(-neg_sim, i, j) for neg_sim, _, _, i, j in pairs]


def absorb(larger: Taxonomy, smaller: Taxonomy) -> Taxonomy:
    """Attach the smaller root as the last child of the larger root."""
    branch = smaller.root.with_kind(NodeKind.INTERNAL)
    root = replace(larger.root, children=larger.root.children + (branch,))
    return replace(larger, root=root, provenance=larger.provenance + smaller.provenance)


def merge_taxonomies(taxonomies: Sequence[Taxonomy], sigma: float,
                     provider: Optional[EmbeddingProvider] = None) -> List[Taxonomy]:
    """Merge taxonomies whose root labels are at least `sigma` similar.

    Pairs are scored once on the incoming label embeddings; a taxonomy absorbed
    earlier in the pass is skipped. Survivors keep their input order.
    """
    if not 0.0 <= sigma <= 1.0:
        raise ConfigError(f"sigma must be in [0, 1], got {sigma}")
    if any(t.root_label_embedding is None for t in taxonomies):
        if provider is None:
            raise ConfigError("root label embeddings are missing and no embedding provider was given")
        taxonomies = embed_root_labels(taxonomies, provider)

    current: List[Optional[Taxonomy]] = list(taxonomies)
    merges = 0
    for sim, i, j in scored_pairs(taxonomies, sigma):
        if current[i] is None or current[j] is None:
            continue
        keep, drop = (i, j) if (current[i].rank(), i) <= (current[j].rank(), j) else (j, i)
        logger.debug(f"Merging {current[drop].label!r} into {current[keep].label!r} (similarity {sim:.3f})")
        current[keep] = absorb(current[keep], current[drop])
        current[drop] = None
        merges += 1
    survivors = [t for t in current if t is not None]
    logger.info(f"Merged {merges} taxonomy pairs at sigma={sigma}; {len(survivors)} taxonomies remain")
    return survivors
