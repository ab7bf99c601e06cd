"""Coherence of labels with their members, and structural statistics."""
from typing import AbstractSet, Dict, List, Mapping, Optional, Sequence

import numpy as np

from ...errors import ConfigError
from ..embed.embedder import embed_texts
from ..embed.models import EmbeddingMatrix
from ..embed.providers import EmbeddingProvider
from .models import Taxonomy


def coherence_score(taxonomy: Taxonomy, embeddings: EmbeddingMatrix,
                    provider: Optional[EmbeddingProvider] = None,
                    leaves: Optional[Sequence[str]] = None) -> float:
    """Mean cosine similarity between the root label and every leaf feature, or only `leaves`."""
    label_vector = taxonomy.root_label_embedding
    if label_vector is None:
        if provider is None:
            raise ConfigError(f"taxonomy {taxonomy.taxonomy_id} has no label embedding and no provider was given")
        label_vector = embed_texts([taxonomy.label], provider)[0]
    index = embeddings.index()
    rows = [index[surface] for surface in (taxonomy.root.leaf_surfaces() if leaves is None else leaves)]
    if not rows:
        raise ConfigError(f"taxonomy {taxonomy.taxonomy_id} has no leaves to score")
    return float(np.clip(np.mean(embeddings.vectors[rows] @ label_vector), -1.0, 1.0))


def taxonomy_stats(taxonomies: Sequence[Taxonomy]) -> dict:
    if not taxonomies:
        raise ConfigError("no taxonomies to summarize")
    per_taxonomy = [
        {"taxonomy_id": t.taxonomy_id, "label": t.label, "depth": t.depth, "leaves": t.leaf_count}
        for t in taxonomies
    ]
    depths = [row["depth"] for row in per_taxonomy]
    leaves = [row["leaves"] for row in per_taxonomy]
    return {
        "count": len(taxonomies),
        "taxonomies": per_taxonomy,
        "depth": {"mean": float(np.mean(depths)), "min": min(depths), "max": max(depths)},
        "leaves": {"mean": float(np.mean(leaves)), "min": min(leaves), "max": max(leaves)},
        "empty_taxonomies": sum(1 for n in leaves if n == 0),
    }


def top_coherent(taxonomies: Sequence[Taxonomy], coherence: Dict[str, float],
                 top_n: int = 5, samples: int = 4) -> List[dict]:
    """Highest-coherence taxonomies with a few member features each."""
    ranked = sorted(taxonomies, key=lambda t: (-coherence[t.taxonomy_id], t.taxonomy_id))
    return [
        {
            "taxonomy_id": t.taxonomy_id,
            "label": t.label,
            "coherence": coherence[t.taxonomy_id],
            "members": t.root.leaf_surfaces()[:samples],
        }
        for t in ranked[:top_n]
    ]


def top_coherent_by_app(taxonomies: Sequence[Taxonomy], embeddings: EmbeddingMatrix,
                        surface_apps: Mapping[str, AbstractSet[str]],
                        top_n: int = 5, samples: int = 4) -> Dict[str, List[dict]]:
    """Per app, the taxonomies with the most coherent members mentioned in that app's reviews.

    `surface_apps` maps a feature surface to the apps whose reviews mention it.
    Coherence is taken over the app's own members only.
    """
    ranked: Dict[str, List[dict]] = {}
    for taxonomy in taxonomies:
        members: Dict[str, List[str]] = {}
        for surface in taxonomy.root.leaf_surfaces():
            for app_id in sorted(surface_apps.get(surface, ())):
                members.setdefault(app_id, []).append(surface)
        for app_id, surfaces in members.items():
            ranked.setdefault(app_id, []).append({
                "taxonomy_id": taxonomy.taxonomy_id,
                "label": taxonomy.label,
                "coherence": coherence_score(taxonomy, embeddings, leaves=surfaces),
                "members": surfaces[:samples],
            })
    return {
        app_id: sorted(rows, key=lambda row: (-row["coherence"], row["taxonomy_id"]))[:top_n]
        for app_id, rows in sorted(ranked.items())
    }
