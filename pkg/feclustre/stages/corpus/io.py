"""JSONL readers and writers for reviews, features and gold annotations."""
import json
import logging
from pathlib import Path
from typing import AbstractSet, Dict, Iterator, List, Optional, Sequence, Tuple

from ...errors import ConfigError, SkippableReview
from .features import build_feature_set, features_from_raw
from .models import DedupScope, Feature, FeatureSet, FeatureSource, Review
from .preprocess import preprocess_review

logger = logging.getLogger(__name__)


def iter_jsonl(path) -> Iterator[Tuple[int, dict]]:
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as e:
                raise ConfigError(f"{path}:{lineno}: invalid JSON ({e.msg})") from e
            if not isinstance(record, dict):
                raise ConfigError(f"{path}:{lineno}: expected a JSON object")
            yield lineno, record


def write_jsonl(path, records) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record, ensure_ascii=False, sort_keys=True) + "\n")


def read_reviews(path) -> List[Review]:
    reviews = []
    for lineno, record in iter_jsonl(path):
        try:
            reviews.append(Review(
                review_id=str(record["review_id"]),
                app_id=str(record.get("app_id", "")),
                body=record["body"],
                submitted_at=record.get("submitted_at"),
            ))
        except KeyError as e:
            raise ConfigError(f"{path}:{lineno}: missing field {e}") from e
    return reviews


def ingest_reviews(path) -> Tuple[List[Review], List[dict]]:
    """Read and clean a review corpus.

    Duplicate review ids (first wins) and reviews that are empty after cleaning
    are dropped and reported.
    """
    reviews, diagnostics, seen = [], [], set()
    for lineno, record in iter_jsonl(path):
        review_id = str(record.get("review_id") or "")
        if not review_id:
            diagnostics.append({"line": lineno, "reason": "missing review_id"})
            continue
        if review_id in seen:
            diagnostics.append({"line": lineno, "review_id": review_id, "reason": "duplicate review_id"})
            continue
        try:
            body = preprocess_review(str(record.get("body") or ""), review_id)
        except SkippableReview as e:
            diagnostics.append({"line": lineno, "review_id": review_id, "reason": str(e)})
            continue
        seen.add(review_id)
        reviews.append(Review(review_id, str(record.get("app_id", "")), body, record.get("submitted_at")))
    if diagnostics:
        logger.warning(f"Skipped {len(diagnostics)} reviews while ingesting {path}")
    return reviews, diagnostics


def write_reviews(path, reviews: Sequence[Review]) -> None:
    write_jsonl(path, (r.to_dict() for r in reviews))


def read_features(path, scope: DedupScope = DedupScope.CORPUS,
                  default_source: FeatureSource = FeatureSource.SYNTACTIC,
                  review_ids: Optional[AbstractSet[str]] = None) -> Tuple[FeatureSet, List[dict]]:
    """Read a features JSONL file into a FeatureSet; `freq` defaults to 1.

    With `review_ids`, records of other reviews are dropped before deduplication.
    """
    features, counts, rejected = [], [], []
    for lineno, record in iter_jsonl(path):
        try:
            source = FeatureSource(record.get("source", FeatureSource(default_source).value))
            raw, review_id = record["surface"], str(record.get("review_id", ""))
        except (KeyError, ValueError) as e:
            raise ConfigError(f"{path}:{lineno}: bad feature record ({e})") from e
        if review_ids is not None and review_id not in review_ids:
            continue
        accepted, dropped = features_from_raw([(review_id, raw)], source)
        rejected.extend(dropped)
        if accepted:
            features.append(accepted[0])
            counts.append(int(record.get("freq", 1)))
    return build_feature_set(features, scope, counts), rejected


def write_features(path, feature_set: FeatureSet) -> None:
    write_jsonl(path, (
        {"surface": f.surface, "review_id": f.review_id, "source": f.source.value, "freq": feature_set.freq(f)}
        for f in feature_set.features
    ))


def read_gold(path) -> Dict[str, List[Feature]]:
    """Gold annotations keyed by review id; repeated features are kept."""
    gold: Dict[str, List[Feature]] = {}
    for lineno, record in iter_jsonl(path):
        review_id = str(record.get("review_id") or "")
        if not review_id:
            raise ConfigError(f"{path}:{lineno}: missing review_id")
        accepted, _ = features_from_raw(((review_id, raw) for raw in record.get("features", [])), FeatureSource.GOLD)
        gold.setdefault(review_id, []).extend(accepted)
    return gold


def group_by_review(feature_set: FeatureSet) -> Dict[str, List[Feature]]:
    """Per-review predicted feature lists, in file order."""
    grouped: Dict[str, List[Feature]] = {}
    for feature in feature_set.features:
        grouped.setdefault(feature.review_id, []).append(feature)
    return grouped


def surface_apps(reviews: Sequence[Review], feature_set: FeatureSet) -> Dict[str, set]:
    """Apps whose reviews mention each surface, through the features' review provenance."""
    app_of = {r.review_id: r.app_id for r in reviews}
    apps: Dict[str, set] = {}
    for feature in feature_set.features:
        app_id = app_of.get(feature.review_id)
        if app_id:
            apps.setdefault(feature.surface, set()).add(app_id)
    return apps
