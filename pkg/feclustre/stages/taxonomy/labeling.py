"""Cluster and subcategory labels, from a chat model or a deterministic stub."""
import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Sequence, Tuple

import regex

from ...config.settings import MIN_SUBTREE_SIZE
from ...errors import LabelingError
from ..corpus.preprocess import tokenize
from .models import LabelerConfig, LabelerMode, NodeKind, TaxonomyNode
from .services.chat_client import complete

logger = logging.getLogger(__name__)

WORD_RE = regex.compile(r"[\p{L}\p{N}]")
STOPWORDS = frozenset(
    "a an and are as at be by can for from has have i in is it its me my not of on or so that the "
    "this to too was with you your".split()
)


@dataclass(frozen=True)
class LabelResult:
    label: str
    fallback: bool = False
    diagnostic: Optional[str] = None


def stub_label(surfaces: Sequence[str]) -> str:
    """The two most frequent content tokens, ties alphabetical, joined by a space."""
    words = [t.lower() for s in surfaces for t in tokenize(s) if WORD_RE.search(t)]
    content = [w for w in words if w not in STOPWORDS] or words
    if not content:
        return " ".join(surfaces).strip() or "unlabeled"
    ranked = sorted(Counter(content).items(), key=lambda item: (-item[1], item[0]))
    return " ".join(word for word, _ in ranked[:2])


def build_messages(surfaces: Sequence[str], config: LabelerConfig) -> List[Dict[str, str]]:
    messages = [{"role": "system", "content": config.prompt_template}]
    for examples, label in config.few_shot_examples:
        messages.append({"role": "user", "content": "Features: " + ", ".join(examples)})
        messages.append({"role": "assistant", "content": label})
    messages.append({"role": "user", "content": "Features: " + ", ".join(surfaces)})
    return messages


def trim_label(text: str, max_tokens: int) -> str:
    lines = [line for line in text.strip().splitlines() if line.strip()]
    if not lines:
        return ""
    words = lines[0].strip().strip("\"'`*.").split()
    return " ".join(words[:max_tokens]).lower()


def label_with_diagnostics(surfaces: Sequence[str], config: LabelerConfig) -> LabelResult:
    if not surfaces:
        raise LabelingError("cannot label an empty member list")
    if LabelerMode(config.mode) == LabelerMode.STUB:
        return LabelResult(stub_label(surfaces))
    try:
        text = complete(build_messages(surfaces, config), config.model,
                        temperature=config.temperature, retries=config.retries, api_base=config.api_base)
    except LabelingError as e:
        logger.warning(f"Falling back to stub label: {e}")
        return LabelResult(stub_label(surfaces), fallback=True, diagnostic=str(e))
    label = trim_label(text, config.max_label_tokens)
    if not label:
        logger.warning("Labeler returned an empty response; falling back to stub label")
        return LabelResult(stub_label(surfaces), fallback=True, diagnostic="empty response")
    return LabelResult(label)


def label_cluster(surfaces: Sequence[str], config: LabelerConfig) -> str:
    return label_with_diagnostics(surfaces, config).label


def label_internal_nodes(root: TaxonomyNode, config: LabelerConfig,
                         min_subtree_size: int = MIN_SUBTREE_SIZE,
                         diagnostics: Optional[List[dict]] = None) -> TaxonomyNode:
    """Relabel internal nodes bottom-up; the root keeps its label.

    Nodes with at least `min_subtree_size` leaves go through the labeler, smaller
    ones get the stub label.
    """
    relabeled: Dict[int, TaxonomyNode] = {}
    stack = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if node.kind == NodeKind.LEAF:
            continue
        if not expanded:
            stack.append((node, True))
            stack.extend((child, False) for child in node.children)
            continue
        children = tuple(relabeled.pop(id(c), c) for c in node.children)
        if node.kind == NodeKind.ROOT:
            relabeled[id(node)] = replace(node, children=children)
            continue
        surfaces = node.leaf_surfaces()
        if len(surfaces) >= min_subtree_size:
            result = label_with_diagnostics(surfaces, config)
            if result.fallback and diagnostics is not None:
                diagnostics.append({"node_id": node.node_id, "fallback": True, "reason": result.diagnostic})
            label = result.label
        else:
            label = stub_label(surfaces)
        relabeled[id(node)] = replace(node, label=label, children=children)
    return relabeled[id(root)]


def label_tree(root: TaxonomyNode, config: LabelerConfig,
               min_subtree_size: int = MIN_SUBTREE_SIZE) -> Tuple[TaxonomyNode, List[dict]]:
    """Root label from all leaves plus internal subcategory labels."""
    diagnostics: List[dict] = []
    result = label_with_diagnostics(root.leaf_surfaces(), config)
    if result.fallback:
        diagnostics.append({"node_id": root.node_id, "fallback": True, "reason": result.diagnostic})
    labeled = label_internal_nodes(replace(root, label=result.label), config, min_subtree_size, diagnostics)
    return labeled, diagnostics


def label_clusters(roots: Sequence[TaxonomyNode], config: LabelerConfig,
                   min_subtree_size: int = MIN_SUBTREE_SIZE) -> List[Tuple[TaxonomyNode, List[dict]]]:
    """Label many cluster trees with bounded concurrency; output follows input order."""
    config.validate()
    with ThreadPoolExecutor(max_workers=max(1, config.max_workers)) as pool:
        results = list(pool.map(lambda root: label_tree(root, config, min_subtree_size), roots))
    fallbacks = sum(len(d) for _, d in results)
    logger.info(f"Labeled {len(roots)} clusters ({fallbacks} stub fallbacks)")
    return results
