"""Clustering and taxonomy quality report: JSON document plus a text rendering."""
import json
import math
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence

from ...errors import ConfigError
from ..cluster.models import ClusteringCandidate
from ..select.selection import SelectionConfig, Strategy, score_candidates
from ..taxonomy.models import Taxonomy
from ..taxonomy.scoring import taxonomy_stats, top_coherent
from .models import AppTopClusters, CandidateRow, CorrectnessRow, QualityReport, Spread, TaxonomyRow, TopCluster
from .scoring import render_correctness_table


def _finite(value: Optional[float]) -> Optional[float]:
    return value if value is not None and math.isfinite(value) else None


def quality_report(candidates: Sequence[ClusteringCandidate], selection: ClusteringCandidate,
                   taxonomies: Sequence[Taxonomy], coherence: Dict[str, float],
                   selection_config: SelectionConfig = SelectionConfig(),
                   correctness: Sequence[CorrectnessRow] = (), top_n: int = 5,
                   top_by_app: Optional[Mapping[str, List[dict]]] = None) -> QualityReport:
    if not taxonomies:
        raise ConfigError("quality report needs at least one taxonomy")
    stats = taxonomy_stats(taxonomies)
    scores = score_candidates(candidates, selection_config)
    return QualityReport(
        n_features=selection.n,
        strategy=Strategy(selection_config.strategy).value,
        chosen_threshold=selection.threshold,
        chosen_k=selection.k,
        chosen_silhouette=selection.silhouette,
        chosen_silhouette_std=selection.silhouette_std,
        chosen_davies_bouldin=_finite(selection.davies_bouldin),
        candidates=[
            CandidateRow(threshold=c.threshold, k=c.k, valid=c.valid, silhouette=c.silhouette,
                         silhouette_std=c.silhouette_std, davies_bouldin=_finite(c.davies_bouldin),
                         composite=c.composite, score=_finite(s))
            for c, s in zip(candidates, scores)
        ],
        taxonomy_count=stats["count"],
        empty_taxonomies=stats["empty_taxonomies"],
        depth=Spread(**stats["depth"]),
        leaves=Spread(**stats["leaves"]),
        mean_coherence=sum(coherence[t.taxonomy_id] for t in taxonomies) / len(taxonomies),
        taxonomies=[
            TaxonomyRow(**row, coherence=coherence[row["taxonomy_id"]]) for row in stats["taxonomies"]
        ],
        top_clusters=[TopCluster(**row) for row in top_coherent(taxonomies, coherence, top_n)],
        top_clusters_by_app=[
            AppTopClusters(app_id=app_id, clusters=[TopCluster(**row) for row in rows])
            for app_id, rows in (top_by_app or {}).items()
        ],
        correctness=list(correctness),
    )


def report_schema() -> dict:
    return QualityReport.model_json_schema()


def write_report(path, report: QualityReport) -> None:
    Path(path).write_text(json.dumps(report.model_dump(mode="json"), indent=2, ensure_ascii=False), encoding="utf-8")


def read_report(path) -> QualityReport:
    return QualityReport.model_validate_json(Path(path).read_text(encoding="utf-8"))


def render_report(report: QualityReport) -> str:
    lines = [
        f"Features: {report.n_features}   Strategy: {report.strategy}",
        f"Chosen threshold {report.chosen_threshold:.2f}: k={report.chosen_k} "
        f"silhouette={report.chosen_silhouette:.3f}"
        + (f" +/- {report.chosen_silhouette_std:.3f}" if report.chosen_silhouette_std is not None else ""),
        "",
        f"{'t':>5} {'k':>5} {'sil':>7} {'DB':>7} {'comp':>7} {'score':>7}",
    ]
    for row in report.candidates:
        if not row.valid:
            lines.append(f"{row.threshold:>5.2f} {row.k:>5}   (invalid)")
            continue
        db = f"{row.davies_bouldin:>7.3f}" if row.davies_bouldin is not None else f"{'inf':>7}"
        score = f"{row.score:>7.3f}" if row.score is not None else f"{'-':>7}"
        lines.append(f"{row.threshold:>5.2f} {row.k:>5} {row.silhouette:>7.3f} {db} {row.composite:>7.3f} {score}")
    lines += [
        "",
        f"Taxonomies: {report.taxonomy_count} (empty: {report.empty_taxonomies})",
        f"Depth mean {report.depth.mean:.2f} [{report.depth.min:g}, {report.depth.max:g}]   "
        f"Leaves mean {report.leaves.mean:.2f} [{report.leaves.min:g}, {report.leaves.max:g}]",
        f"Mean coherence {report.mean_coherence:.3f}",
        "",
        "Top clusters by coherence:",
    ]
    for top in report.top_clusters:
        lines.append(f"  {top.label:<30} {top.coherence:.3f}  {', '.join(top.members)}")
    for app in report.top_clusters_by_app:
        lines += ["", f"Top clusters for {app.app_id}:"]
        for top in app.clusters:
            lines.append(f"  {top.label:<30} {top.coherence:.3f}  {', '.join(top.members)}")
    if report.correctness:
        lines += ["", render_correctness_table(report.correctness)]
    return "\n".join(lines) + "\n"
