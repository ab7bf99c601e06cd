"""Per-cluster mini-taxonomies carved out of the dendrogram."""
from typing import Dict, List, Optional, Sequence, Union

from ...config.settings import MIN_SUBTREE_SIZE
from ...errors import ConfigError
from ..cluster.models import Dendrogram
from .labeling import stub_label
from .models import NodeKind, TaxonomyNode

# A restricted subtree: a leaf index, or (dendrogram node, children, leaf count).
_Sub = Union[int, tuple]


def _leaf_count(sub: _Sub) -> int:
    return 1 if isinstance(sub, int) else sub[2]


def _restrict(members: Sequence[int], dendrogram: Dendrogram) -> _Sub:
    """Dendrogram restricted to `members`, with unary chains collapsed."""
    keep = set(members)
    restricted: Dict[int, Optional[_Sub]] = {leaf: leaf for leaf in keep}
    n = dendrogram.n_leaves
    for step, merge in enumerate(dendrogram.merges):
        left = restricted.pop(merge.left, None)
        right = restricted.pop(merge.right, None)
        if left is None and right is None:
            continue
        if left is None or right is None:
            restricted[n + step] = right if left is None else left
        else:
            restricted[n + step] = (n + step, [left, right], _leaf_count(left) + _leaf_count(right))
        if len(restricted) == 1 and _leaf_count(next(iter(restricted.values()))) == len(keep):
            break
    if len(restricted) != 1:
        raise ConfigError(f"members {sorted(keep)[:5]}... do not share a dendrogram subtree")
    return next(iter(restricted.values()))


def _flatten(sub: _Sub, min_subtree_size: int) -> _Sub:
    """Splice internal nodes below `min_subtree_size` leaves into their parent, bottom-up."""
    if isinstance(sub, int):
        return sub
    stack = [(sub, False)]
    while stack:
        node, expanded = stack.pop()
        if not expanded:
            stack.append((node, True))
            stack.extend((c, False) for c in node[1] if not isinstance(c, int))
            continue
        spliced: List[_Sub] = []
        for child in node[1]:
            if not isinstance(child, int) and child[2] < min_subtree_size:
                spliced.extend(child[1])
            else:
                spliced.append(child)
        node[1][:] = spliced
    return sub


def build_hierarchy(members: Sequence[int], dendrogram: Dendrogram, surfaces: Sequence[str],
                    cluster_id: int = 0, min_subtree_size: int = MIN_SUBTREE_SIZE) -> TaxonomyNode:
    """Mini-taxonomy for one cluster.

    Node labels start out as stub labels of their leaf surfaces; leaves are
    labeled with their feature.
    """
    if not members:
        raise ConfigError("cannot build a hierarchy for an empty cluster")
    sub = _flatten(_restrict(members, dendrogram), min_subtree_size)

    def leaf_node(index: int) -> TaxonomyNode:
        return TaxonomyNode(node_id=f"c{cluster_id}_n{index}", label=surfaces[index],
                            kind=NodeKind.LEAF, feature=surfaces[index])

    if isinstance(sub, int):
        return TaxonomyNode(node_id=f"c{cluster_id}_root", label=stub_label([surfaces[sub]]),
                            kind=NodeKind.ROOT, children=(leaf_node(sub),))

    built: Dict[int, TaxonomyNode] = {}
    stack = [(sub, False)]
    while stack:
        node, expanded = stack.pop()
        if not expanded:
            stack.append((node, True))
            stack.extend((c, False) for c in node[1] if not isinstance(c, int))
            continue
        children = tuple(leaf_node(c) if isinstance(c, int) else built.pop(c[0]) for c in node[1])
        is_root = node is sub
        built[node[0]] = TaxonomyNode(
            node_id=f"c{cluster_id}_root" if is_root else f"c{cluster_id}_n{node[0]}",
            label=stub_label([leaf.feature for child in children for leaf in child.leaves()]),
            kind=NodeKind.ROOT if is_root else NodeKind.INTERNAL,
            children=children,
        )
    return built[sub[0]]
