import logging
from typing import List, Optional, Sequence, Tuple

from ...config.settings import MIN_SUBTREE_SIZE
from ..cluster.models import ClusteringCandidate, Dendrogram
from ..embed.providers import EmbeddingProvider
from .hierarchy import build_hierarchy
from .labeling import label_clusters
from .merging import embed_root_labels
from .models import LabelerConfig, Taxonomy

logger = logging.getLogger(__name__)


def tag_clusters(candidate: ClusteringCandidate, dendrogram: Dendrogram, surfaces: Sequence[str],
                 labeler: LabelerConfig, provider: Optional[EmbeddingProvider] = None,
                 min_subtree_size: int = MIN_SUBTREE_SIZE) -> Tuple[List[Taxonomy], List[dict]]:
    """One labeled mini-taxonomy per cluster of the selected cut.

    Root labels are embedded with `provider` when one is given.
    """
    groups = candidate.members()
    roots = [build_hierarchy(members, dendrogram, surfaces, cluster_id, min_subtree_size)
             for cluster_id, members in enumerate(groups)]
    labeled = label_clusters(roots, labeler, min_subtree_size)
    taxonomies, diagnostics = [], []
    for cluster_id, (root, notes) in enumerate(labeled):
        taxonomies.append(Taxonomy(taxonomy_id=f"t{cluster_id}", root=root, provenance=(cluster_id,)))
        diagnostics.extend(dict(note, cluster=cluster_id) for note in notes)
    if provider is not None:
        taxonomies = embed_root_labels(taxonomies, provider)
    logger.info(f"Tagged {len(taxonomies)} clusters")
    return taxonomies, diagnostics
