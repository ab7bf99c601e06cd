"""Taxonomy trees and labeler settings."""
import json
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from ...config.settings import DEFAULT_LLM_MODEL, LABEL_MAX_WORKERS, LABEL_RETRIES, LABEL_TEMPERATURE, MAX_LABEL_TOKENS
from ...errors import ConfigError


class NodeKind(str, Enum):
    ROOT = "root"
    INTERNAL = "internal"
    LEAF = "leaf"


@dataclass(frozen=True)
class TaxonomyNode:
    node_id: str
    label: str
    kind: NodeKind
    children: Tuple["TaxonomyNode", ...] = ()
    feature: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if not self.label:
            raise ConfigError(f"node {self.node_id} has an empty label")
        if self.kind == NodeKind.LEAF:
            if self.feature is None or self.children:
                raise ConfigError(f"leaf {self.node_id} must carry one feature and no children")
        elif not self.children or self.feature is not None:
            raise ConfigError(f"{self.kind.value} node {self.node_id} needs children and no feature")

    def leaves(self) -> List["TaxonomyNode"]:
        found, stack = [], [self]
        while stack:
            node = stack.pop()
            if node.kind == NodeKind.LEAF:
                found.append(node)
            else:
                stack.extend(reversed(node.children))
        return found

    def leaf_surfaces(self) -> List[str]:
        return [leaf.feature for leaf in self.leaves()]

    def depth(self) -> int:
        """Levels on the longest root-to-leaf path, counting the root as 1."""
        best, stack = 0, [(self, 1)]
        while stack:
            node, level = stack.pop()
            best = max(best, level)
            stack.extend((child, level + 1) for child in node.children)
        return best

    def walk(self) -> Iterator[Tuple[Optional["TaxonomyNode"], "TaxonomyNode"]]:
        """(parent, node) pairs in pre-order; the root's parent is None."""
        stack = [(None, self)]
        while stack:
            parent, node = stack.pop()
            yield parent, node
            stack.extend((node, child) for child in reversed(node.children))

    def with_kind(self, kind: NodeKind) -> "TaxonomyNode":
        return replace(self, kind=kind)


@dataclass(frozen=True, eq=False)
class Taxonomy:
    taxonomy_id: str
    root: TaxonomyNode
    provenance: Tuple[int, ...]
    root_label_embedding: Optional[np.ndarray] = None

    @property
    def label(self) -> str:
        return self.root.label

    @property
    def leaf_count(self) -> int:
        return len(self.root.leaves())

    @property
    def depth(self) -> int:
        return self.root.depth()

    def rank(self) -> Tuple[int, int, str]:
        """Sort key putting the larger taxonomy first: more leaves, then deeper, then label."""
        return (-self.leaf_count, -self.depth, self.label)


class LabelerMode(str, Enum):
    REMOTE_LLM = "remote_llm"
    STUB = "deterministic_stub"


DEFAULT_PROMPT = (
    "You name groups of mobile-app features with a 1-4 word category. "
    "Reply with the category name only."
)

DEFAULT_FEW_SHOT: Tuple[Tuple[Tuple[str, ...], str], ...] = (
    (("dark mode", "night theme", "font size", "custom colors"), "appearance settings"),
    (("voice input", "speech to text", "read aloud", "dictation"), "voice interaction"),
    (("share chat", "export conversation", "copy answer", "save history"), "conversation sharing"),
)


@dataclass(frozen=True)
class LabelerConfig:
    mode: LabelerMode = LabelerMode.STUB
    prompt_template: str = DEFAULT_PROMPT
    few_shot_examples: Sequence[Tuple[Sequence[str], str]] = field(default=DEFAULT_FEW_SHOT)
    max_label_tokens: int = MAX_LABEL_TOKENS
    temperature: float = LABEL_TEMPERATURE
    model: str = DEFAULT_LLM_MODEL
    api_base: Optional[str] = None
    retries: int = LABEL_RETRIES
    max_workers: int = LABEL_MAX_WORKERS

    def validate(self) -> None:
        mode = LabelerMode(self.mode)
        if mode == LabelerMode.REMOTE_LLM and not self.few_shot_examples:
            raise ConfigError("remote labeling needs at least one few-shot example")
        if self.max_label_tokens < 1:
            raise ConfigError("max_label_tokens must be >= 1")


def load_few_shot(path) -> Tuple[Tuple[Tuple[str, ...], str], ...]:
    """Few-shot pairs from a JSON list of {"features": [...], "label": str}."""
    try:
        with open(path, encoding="utf-8") as handle:
            items = json.load(handle)
        return tuple((tuple(item["features"]), item["label"]) for item in items)
    except (OSError, json.JSONDecodeError, KeyError, TypeError) as e:
        raise ConfigError(f"{path}: unreadable few-shot examples ({e})") from e
