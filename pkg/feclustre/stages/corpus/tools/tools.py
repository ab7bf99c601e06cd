import logging
from typing import Any, Dict, List, Optional, Sequence, Tuple

from ....errors import FeClustError
from ..features import merge_feature_sets, to_corpus_scope
from ..io import ingest_reviews, read_features, read_reviews, write_features, write_reviews
from ..models import DedupScope, FeatureSet, FeatureSource
from ..sampling import allocate_strata, stratified_sample
from ..services.extractor_client import fetch_external_features

logger = logging.getLogger(__name__)


def ingest_corpus(input_path: str, output_path: str) -> Dict[str, Any]:
    """
    Clean a raw review corpus and write it back as JSONL.

    Args:
        input_path: Raw reviews JSONL ({"review_id", "app_id", "body", "submitted_at"?})
        output_path: Where the cleaned reviews go

    Returns:
        Dict with status, kept/skipped counts and per-review diagnostics
    """
    try:
        reviews, diagnostics = ingest_reviews(input_path)
        write_reviews(output_path, reviews)
        logger.info(f"Ingested {len(reviews)} reviews into {output_path}")
        return {
            "status": "success",
            "message": f"kept {len(reviews)} reviews, skipped {len(diagnostics)}",
            "kept": len(reviews),
            "skipped": len(diagnostics),
            "diagnostics": diagnostics,
            "artifacts": [output_path],
        }
    except (FeClustError, OSError) as e:
        logger.error(f"Review ingestion failed: {e}")
        return {"status": "error", "message": f"Failed to ingest reviews: {e}"}


def sample_corpus(input_path: str, output_path: str, size: int, seed: int = 0) -> Dict[str, Any]:
    """
    Stratified sample of a cleaned corpus, proportional to per-app review counts.

    Args:
        input_path: Cleaned reviews JSONL
        output_path: Where the sample goes
        size: Number of reviews to draw
        seed: Sampling seed

    Returns:
        Dict with status and the per-app allocation
    """
    try:
        reviews = read_reviews(input_path)
        counts: Dict[str, int] = {}
        for review in reviews:
            counts[review.app_id] = counts.get(review.app_id, 0) + 1
        allocation = allocate_strata(counts, size)
        sample = stratified_sample(reviews, size, seed)
        write_reviews(output_path, sample)
        return {
            "status": "success",
            "message": f"sampled {len(sample)} of {len(reviews)} reviews",
            "allocation": allocation,
            "artifacts": [output_path],
        }
    except (FeClustError, OSError) as e:
        logger.error(f"Sampling failed: {e}")
        return {"status": "error", "message": f"Failed to sample reviews: {e}"}


def _union(sets: Sequence[FeatureSet]) -> FeatureSet:
    merged = sets[0]
    for other in sets[1:]:
        merged = merge_feature_sets(merged, other)
    return merged


def _in_scope(feature_set: FeatureSet, scope: DedupScope) -> FeatureSet:
    return to_corpus_scope(feature_set) if scope == DedupScope.CORPUS else feature_set


def extract_and_merge(feature_inputs: Sequence[Tuple[str, str]], output_path: str,
                      scope: str = DedupScope.CORPUS.value,
                      reviews_path: Optional[str] = None,
                      extractor_endpoint: Optional[str] = None,
                      extractor_source: str = FeatureSource.LLM.value,
                      review_output_path: Optional[str] = None) -> Dict[str, Any]:
    """
    Union extractor outputs into one hybrid feature set.

    Args:
        feature_inputs: (path, source) pairs of feature JSONL files, merged left to right
        output_path: Where the merged features go
        scope: "corpus" or "review" deduplication
        reviews_path: Optional cleaned corpus; features of other reviews are dropped before deduplication
        extractor_endpoint: Optional remote extractor queried for the reviews in reviews_path
        extractor_source: Source recorded on features returned by the remote extractor
        review_output_path: Optional file for the per-review union, used to score the hybrid extractor

    Returns:
        Dict with status, feature counts per source and diagnostics
    """
    try:
        scope = DedupScope(scope)
        reviews = read_reviews(reviews_path) if reviews_path else None
        keep = {r.review_id for r in reviews} if reviews is not None else None
        per_review, diagnostics, counts = [], [], {}
        for path, source in feature_inputs:
            feature_set, rejected = read_features(path, DedupScope.REVIEW, FeatureSource(source), review_ids=keep)
            per_review.append(feature_set)
            diagnostics.extend(rejected)
            counts[path] = len(_in_scope(feature_set, scope))
        if extractor_endpoint:
            remote, errors = fetch_external_features(extractor_endpoint, reviews or [],
                                                     source=FeatureSource(extractor_source), scope=DedupScope.REVIEW)
            per_review.append(remote)
            diagnostics.extend(errors)
            counts[extractor_endpoint] = len(_in_scope(remote, scope))
        if not per_review:
            return {"status": "error", "message": "No feature inputs were given"}
        merged = _union([_in_scope(s, scope) for s in per_review])
        if not len(merged):
            return {"status": "error", "message": "Feature set is empty after merging"}
        write_features(output_path, merged)
        artifacts = [output_path]
        if review_output_path:
            write_features(review_output_path, _union(per_review))
            artifacts.append(review_output_path)
        hybrid = sum(1 for f in merged if f.source == FeatureSource.HYBRID)
        logger.info(f"Merged {len(merged)} features ({hybrid} hybrid) into {output_path}")
        return {
            "status": "success",
            "message": f"{len(merged)} features, {hybrid} found by more than one extractor",
            "features": len(merged),
            "hybrid": hybrid,
            "inputs": counts,
            "diagnostics": diagnostics,
            "artifacts": artifacts,
        }
    except (FeClustError, OSError, ValueError) as e:
        logger.error(f"Feature merge failed: {e}")
        return {"status": "error", "message": f"Failed to merge features: {e}"}
