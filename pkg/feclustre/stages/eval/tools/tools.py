import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from ....errors import FeClustError
from ..report import quality_report, render_report, write_report
from ..models import CorrectnessRow
from ..scoring import average_rows, correctness_table, render_correctness_table
from ...cluster.report import candidate_from_dict, read_candidates
from ...corpus.io import group_by_review, read_features, read_gold, read_reviews, surface_apps
from ...corpus.models import DedupScope, FeatureSource
from ...embed.cache import read_embeddings
from ...embed.models import EmbeddingMatrix
from ...select.selection import SelectionConfig, Strategy
from ...taxonomy.export import read_taxonomies
from ...taxonomy.scoring import coherence_score, top_coherent_by_app

logger = logging.getLogger(__name__)


def evaluate_extractors(gold_path: str, predictions: Sequence[Tuple[str, str]], output_path: str,
                        dataset: str = "corpus", n_slack: Sequence[int] = (0, 1, 2),
                        beta: float = 2.385, text_path: Optional[str] = None,
                        reviews_path: Optional[str] = None) -> Dict[str, Any]:
    """
    Score extractor outputs against gold annotations.

    Args:
        gold_path: Gold JSONL ({"review_id", "features": [...]})
        predictions: (extractor name, features JSONL path) pairs
        output_path: Where the correctness rows go (JSON)
        dataset: Dataset name used in the table
        n_slack: Allowed word-length differences
        beta: F-beta weight
        text_path: Optional aligned text rendering
        reviews_path: Optional reviews JSONL; only these reviews are scored, on both sides

    Returns:
        Dict with status and the correctness rows
    """
    try:
        gold = read_gold(gold_path)
        keep = {r.review_id for r in read_reviews(reviews_path)} if reviews_path else None
        if keep is not None:
            gold = {review_id: features for review_id, features in gold.items() if review_id in keep}
        predicted = {}
        for name, path in predictions:
            feature_set, _ = read_features(path, DedupScope.REVIEW, FeatureSource.SYNTACTIC, review_ids=keep)
            predicted[name] = group_by_review(feature_set)
        rows = correctness_table({dataset: predicted}, {dataset: gold}, n_slack, beta)
        document = [row.model_dump() for row in rows]
        Path(output_path).write_text(json.dumps(document, indent=2), encoding="utf-8")
        artifacts = [output_path]
        if text_path:
            Path(text_path).write_text(render_correctness_table(rows) + "\n", encoding="utf-8")
            artifacts.append(text_path)
        return {"status": "success", "message": f"scored {len(predicted)} extractors",
                "rows": document, "artifacts": artifacts}
    except (FeClustError, OSError) as e:
        logger.error(f"Extraction evaluation failed: {e}")
        return {"status": "error", "message": f"Failed to evaluate extraction: {e}"}


def build_quality_report(candidates_path: str, selection_path: str, taxonomies_path: str, embeddings_path: str,
                         output_path: str, text_path: str, strategy: str = "balanced", alpha: float = 0.25,
                         gamma: float = 0.25, stability_margin: float = 0.05,
                         correctness_path: Optional[str] = None, top_n: int = 5,
                         reviews_path: Optional[str] = None,
                         review_features_path: Optional[str] = None) -> Dict[str, Any]:
    """
    Assemble the clustering and taxonomy quality report.

    Args:
        candidates_path: Candidate report JSON
        selection_path: Selection report JSON
        taxonomies_path: Merged taxonomies JSON
        embeddings_path: Feature embeddings JSONL
        output_path: Report JSON
        text_path: Report as aligned text
        strategy, alpha, gamma, stability_margin: Selection settings used for the score column
        correctness_path: Optional correctness rows to include
        top_n: Number of top-coherence clusters listed
        reviews_path: Optional reviews JSONL giving each review's app
        review_features_path: Optional per-review features; with reviews_path, top clusters are also ranked per app

    Returns:
        Dict with status, taxonomy count and mean coherence
    """
    try:
        candidates = read_candidates(candidates_path)
        chosen = candidate_from_dict(json.loads(Path(selection_path).read_text(encoding="utf-8"))["chosen"])
        taxonomies = read_taxonomies(taxonomies_path)
        ids, vectors = read_embeddings(embeddings_path)
        embeddings = EmbeddingMatrix(ids=ids, vectors=vectors, provider_tag="file")
        coherence = {t.taxonomy_id: coherence_score(t, embeddings) for t in taxonomies}
        correctness: List = []
        if correctness_path:
            rows = [CorrectnessRow.model_validate(r) for r in json.loads(Path(correctness_path).read_text(encoding="utf-8"))]
            correctness = rows + (average_rows(rows) if len({r.dataset for r in rows}) > 1 else [])
        config = SelectionConfig(strategy=Strategy(strategy), alpha=alpha, gamma=gamma,
                                 stability_margin=stability_margin)
        top_by_app = None
        if reviews_path and review_features_path:
            by_review, _ = read_features(review_features_path, DedupScope.REVIEW)
            apps = surface_apps(read_reviews(reviews_path), by_review)
            top_by_app = top_coherent_by_app(taxonomies, embeddings, apps, top_n)
        report = quality_report(candidates, chosen, taxonomies, coherence, config, correctness, top_n, top_by_app)
        write_report(output_path, report)
        Path(text_path).write_text(render_report(report), encoding="utf-8")
        return {
            "status": "success",
            "message": f"{report.taxonomy_count} taxonomies, mean coherence {report.mean_coherence:.3f}",
            "empty_taxonomies": report.empty_taxonomies,
            "artifacts": [output_path, text_path],
        }
    except (FeClustError, OSError, KeyError, ValueError) as e:
        logger.error(f"Quality report failed: {e}")
        return {"status": "error", "message": f"Failed to build the quality report: {e}"}
