"""Data model for reviews and extracted features."""
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional, Tuple

from ...errors import ConfigError
from .preprocess import normalize_feature, tokenize


class FeatureSource(str, Enum):
    SYNTACTIC = "syntactic"
    LLM = "llm"
    HYBRID = "hybrid"
    GOLD = "gold"


class DedupScope(str, Enum):
    CORPUS = "corpus"
    REVIEW = "review"


@dataclass(frozen=True)
class Review:
    review_id: str
    app_id: str
    body: str
    submitted_at: Optional[str] = None

    def __post_init__(self):
        if not self.review_id:
            raise ConfigError("review_id must be non-empty")
        if not self.body:
            raise ConfigError(f"review {self.review_id} has an empty body")

    def to_dict(self) -> dict:
        data = {"review_id": self.review_id, "app_id": self.app_id, "body": self.body}
        if self.submitted_at is not None:
            data["submitted_at"] = self.submitted_at
        return data


@dataclass(frozen=True)
class Feature:
    """A normalized feature span with its provenance.

    `tokens` are the word and punctuation segments of `surface` in order; for
    surfaces without internal punctuation `" ".join(tokens) == surface`.
    """

    surface: str
    tokens: Tuple[str, ...]
    review_id: str
    source: FeatureSource

    def __post_init__(self):
        if not self.surface or not self.tokens:
            raise ConfigError("feature surface and tokens must be non-empty")
        if "".join(self.tokens) != self.surface.replace(" ", ""):
            raise ConfigError(f"tokens {self.tokens!r} do not re-join to {self.surface!r}")

    @classmethod
    def from_raw(cls, raw: str, review_id: str, source: FeatureSource) -> "Feature":
        surface = normalize_feature(raw)
        return cls(surface=surface, tokens=tuple(tokenize(surface)), review_id=review_id, source=FeatureSource(source))

    def key(self, scope: DedupScope = DedupScope.CORPUS):
        if scope == DedupScope.REVIEW:
            return (self.review_id, self.surface)
        return self.surface


@dataclass(frozen=True)
class FeatureSet:
    """Deduplicated, ordered features with pre-dedup frequencies.

    In corpus scope no two entries share a surface; in review scope the key is
    (review_id, surface).
    """

    features: Tuple[Feature, ...] = ()
    frequency: Dict[object, int] = field(default_factory=dict)
    dedup_index: Dict[object, int] = field(default_factory=dict)
    scope: DedupScope = DedupScope.CORPUS

    def __len__(self) -> int:
        return len(self.features)

    def __iter__(self):
        return iter(self.features)

    @property
    def surfaces(self) -> Tuple[str, ...]:
        return tuple(f.surface for f in self.features)

    def freq(self, feature: Feature) -> int:
        return self.frequency[feature.key(self.scope)]

    @property
    def total(self) -> int:
        return sum(self.frequency.values())
