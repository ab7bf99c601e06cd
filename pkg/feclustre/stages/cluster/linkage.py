"""UPGMA agglomeration with a per-row minimum cache."""
import logging

import numpy as np

from ...errors import ClusteringError
from ..embed.models import AffinityMatrix
from .models import Dendrogram, Merge

logger = logging.getLogger(__name__)


def _row_min(dist: np.ndarray, ids: np.ndarray, row: int):
    """Minimum of a row and the partner slot holding the smallest cluster id at that minimum."""
    values = dist[row]
    best = values.min()
    if not np.isfinite(best):
        return best, -1
    ties = np.flatnonzero(values == best)
    return best, int(ties[np.argmin(ids[ties])])


def average_linkage(affinity: AffinityMatrix) -> Dendrogram:
    """Average-linkage agglomeration over a dissimilarity matrix.

    Equal heights are resolved by the smallest (left_id, right_id) pair, with
    left_id < right_id, where internal node n+i is created by merge i.
    """
    n = affinity.n
    if n < 2:
        raise ClusteringError(f"linkage needs at least 2 points, got {n}")
    dist = np.array(affinity.dist, dtype=np.float64, copy=True)
    np.fill_diagonal(dist, np.inf)
    ids = np.arange(n)
    sizes = np.ones(n, dtype=np.int64)
    active = np.ones(n, dtype=bool)
    row_min = np.empty(n)
    row_arg = np.empty(n, dtype=np.int64)
    for row in range(n):
        row_min[row], row_arg[row] = _row_min(dist, ids, row)

    merges = []
    for step in range(n - 1):
        height = row_min[active].min()
        best = None
        for row in np.flatnonzero(active & (row_min == height)):
            pair = tuple(sorted((int(ids[row]), int(ids[row_arg[row]]))))
            if best is None or pair < best[0]:
                best = (pair, int(row), int(row_arg[row]))
        _, a, b = best
        if ids[a] > ids[b]:
            a, b = b, a
        merged_size = int(sizes[a] + sizes[b])
        merges.append(Merge(int(ids[a]), int(ids[b]), float(height), merged_size))

        # Slot a holds the merged cluster; slot b is retired.
        row = (sizes[a] * dist[a] + sizes[b] * dist[b]) / merged_size
        dist[a, :] = row
        dist[:, a] = row
        dist[b, :] = np.inf
        dist[:, b] = np.inf
        dist[a, a] = np.inf
        active[b] = False
        row_min[b] = np.inf
        ids[a] = n + step
        sizes[a] = merged_size

        for other in np.flatnonzero(active):
            if other == a or row_arg[other] in (a, b):
                row_min[other], row_arg[other] = _row_min(dist, ids, other)
            elif dist[other, a] < row_min[other]:
                row_min[other], row_arg[other] = dist[other, a], a

    logger.info(f"Built dendrogram over {n} leaves (top height {merges[-1].height:.4f})")
    return Dendrogram(n_leaves=n, merges=tuple(merges))
