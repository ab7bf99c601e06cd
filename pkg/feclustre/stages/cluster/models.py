"""Dendrogram and clustering-candidate records."""
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from ...errors import ClusteringError

HEIGHT_TOLERANCE = 1e-12


@dataclass(frozen=True)
class Merge:
    left: int
    right: int
    height: float
    size: int


@dataclass(frozen=True)
class Dendrogram:
    """Leaves are 0..n-1; merge i creates internal node n+i."""

    n_leaves: int
    merges: Tuple[Merge, ...]

    def __post_init__(self):
        object.__setattr__(self, "merges", tuple(self.merges))
        self.validate()

    def validate(self) -> None:
        n = self.n_leaves
        if n < 1:
            raise ClusteringError("dendrogram needs at least one leaf")
        if len(self.merges) != n - 1:
            raise ClusteringError(f"expected {n - 1} merges for {n} leaves, got {len(self.merges)}")
        sizes = [1] * n
        used = set()
        previous = float("-inf")
        for step, merge in enumerate(self.merges):
            node = n + step
            for child in (merge.left, merge.right):
                if not 0 <= child < node:
                    raise ClusteringError(f"merge {step} references unknown node {child}")
                if child in used:
                    raise ClusteringError(f"node {child} is merged twice")
                used.add(child)
            if merge.height < previous - HEIGHT_TOLERANCE:
                raise ClusteringError(f"merge heights decrease at step {step}")
            previous = merge.height
            size = sizes[merge.left] + sizes[merge.right]
            if size != merge.size:
                raise ClusteringError(f"merge {step} reports size {merge.size}, expected {size}")
            sizes.append(size)

    def children(self, node: int) -> Tuple[int, int]:
        merge = self.merges[node - self.n_leaves]
        return merge.left, merge.right

    def height(self, node: int) -> float:
        if node < self.n_leaves:
            return 0.0
        return self.merges[node - self.n_leaves].height

    @property
    def root(self) -> int:
        return 2 * self.n_leaves - 2

    def to_dict(self) -> dict:
        return {
            "n_leaves": self.n_leaves,
            "merges": [[m.left, m.right, m.height, m.size] for m in self.merges],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Dendrogram":
        try:
            merges = [Merge(int(l), int(r), float(h), int(s)) for l, r, h, s in data["merges"]]
            return cls(n_leaves=int(data["n_leaves"]), merges=tuple(merges))
        except (KeyError, TypeError, ValueError) as e:
            raise ClusteringError(f"malformed dendrogram document: {e}") from e


@dataclass(frozen=True)
class ClusteringCandidate:
    threshold: float
    assignment: Tuple[int, ...]
    k: int
    valid: bool
    silhouette: Optional[float] = None
    silhouette_std: Optional[float] = None
    davies_bouldin: Optional[float] = None
    composite: Optional[float] = None
    cluster_sizes: Tuple[int, ...] = ()
    diagnostics: List[dict] = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.assignment)

    @property
    def max_cluster_size(self) -> int:
        return max(self.cluster_sizes) if self.cluster_sizes else 0

    def members(self) -> List[List[int]]:
        groups: List[List[int]] = [[] for _ in range(self.k)]
        for index, cluster in enumerate(self.assignment):
            groups[cluster].append(index)
        return groups
