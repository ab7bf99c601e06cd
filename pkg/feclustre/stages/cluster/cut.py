from typing import Tuple

from ...errors import ClusteringError
from .models import Dendrogram


def cut(dendrogram: Dendrogram, threshold: float) -> Tuple[int, ...]:
    """Flat assignment from all merges with height strictly below `threshold`.

    Cluster ids are numbered by their smallest leaf, ascending.
    """
    if threshold < 0:
        raise ClusteringError(f"cut threshold must be >= 0, got {threshold}")
    n = dendrogram.n_leaves
    parent = list(range(2 * n - 1))

    def find(node: int) -> int:
        while parent[node] != node:
            parent[node] = parent[parent[node]]
            node = parent[node]
        return node

    for step, merge in enumerate(dendrogram.merges):
        if merge.height >= threshold:
            break
        node = n + step
        parent[find(merge.left)] = node
        parent[find(merge.right)] = node

    labels = {}
    assignment = []
    for leaf in range(n):
        root = find(leaf)
        if root not in labels:
            labels[root] = len(labels)
        assignment.append(labels[root])
    return tuple(assignment)
