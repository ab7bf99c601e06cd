"""Feature post-processing: deduplication and hybrid merging."""
import logging
from dataclasses import replace
from typing import Iterable, List, Optional, Sequence, Tuple

from ...errors import ConfigError, RejectedFeature
from .models import DedupScope, Feature, FeatureSet, FeatureSource

logger = logging.getLogger(__name__)


def features_from_raw(items: Iterable[Tuple[str, str]], source: FeatureSource) -> Tuple[List[Feature], List[dict]]:
    """Normalize (review_id, raw text) pairs into Features.

    Returns:
        The accepted features and one diagnostic per rejected raw feature.
    """
    accepted, rejected = [], []
    for review_id, raw in items:
        try:
            accepted.append(Feature.from_raw(raw, review_id, source))
        except RejectedFeature as e:
            rejected.append({"review_id": review_id, "raw": raw, "reason": str(e)})
    if rejected:
        logger.warning(f"Rejected {len(rejected)} raw features that were empty after normalization")
    return accepted, rejected


def build_feature_set(
    features: Iterable[Feature],
    scope: DedupScope = DedupScope.CORPUS,
    counts: Optional[Sequence[int]] = None,
) -> FeatureSet:
    """Deduplicate features by key, keeping the first occurrence.

    `counts` gives the pre-dedup multiplicity of each input feature (1 when omitted).
    """
    scope = DedupScope(scope)
    kept: List[Feature] = []
    frequency, dedup_index = {}, {}
    for position, feature in enumerate(features):
        count = 1 if counts is None else int(counts[position])
        if count < 1:
            raise ConfigError(f"frequency of {feature.surface!r} must be >= 1")
        key = feature.key(scope)
        if key in dedup_index:
            frequency[key] += count
            continue
        dedup_index[key] = len(kept)
        frequency[key] = count
        kept.append(feature)
    return FeatureSet(features=tuple(kept), frequency=frequency, dedup_index=dedup_index, scope=scope)


def merge_feature_sets(a: FeatureSet, b: FeatureSet) -> FeatureSet:
    """Union two feature sets by key.

    Collisions keep a's occurrence, become `hybrid` and sum frequencies; b's
    novel entries follow a's entries in b's order.
    """
    if a.scope != b.scope:
        raise ConfigError(f"cannot merge feature sets with scopes {a.scope.value} and {b.scope.value}")
    features = list(a.features)
    frequency = dict(a.frequency)
    dedup_index = dict(a.dedup_index)
    for feature in b.features:
        key = feature.key(b.scope)
        if key in dedup_index:
            position = dedup_index[key]
            features[position] = replace(features[position], source=FeatureSource.HYBRID)
            frequency[key] += b.frequency[key]
        else:
            dedup_index[key] = len(features)
            frequency[key] = b.frequency[key]
            features.append(feature)
    return FeatureSet(features=tuple(features), frequency=frequency, dedup_index=dedup_index, scope=a.scope)


def to_corpus_scope(feature_set: FeatureSet) -> FeatureSet:
    """Collapse a per-review set into a corpus-global one, summing frequencies."""
    if feature_set.scope == DedupScope.CORPUS:
        return feature_set
    counts = [feature_set.freq(f) for f in feature_set.features]
    return build_feature_set(feature_set.features, DedupScope.CORPUS, counts)
