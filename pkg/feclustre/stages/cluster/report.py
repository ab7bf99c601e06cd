"""JSON persistence for dendrograms and candidate reports."""
import json
import math
from pathlib import Path
from typing import List, Optional, Sequence

from ...errors import ClusteringError
from .models import ClusteringCandidate, Dendrogram


def _finite(value: Optional[float]) -> Optional[float]:
    if value is None or not math.isfinite(value):
        return None
    return value


def candidate_to_dict(candidate: ClusteringCandidate) -> dict:
    return {
        "threshold": candidate.threshold,
        "k": candidate.k,
        "silhouette": candidate.silhouette,
        "silhouette_std": candidate.silhouette_std,
        "davies_bouldin": _finite(candidate.davies_bouldin),
        "composite": candidate.composite,
        "valid": candidate.valid,
        "cluster_sizes": list(candidate.cluster_sizes),
        "assignment": list(candidate.assignment),
        "diagnostics": candidate.diagnostics,
    }


def candidate_from_dict(data: dict) -> ClusteringCandidate:
    db = data.get("davies_bouldin")
    if data.get("valid") and db is None:
        db = math.inf
    return ClusteringCandidate(
        threshold=float(data["threshold"]),
        assignment=tuple(int(a) for a in data.get("assignment", ())),
        k=int(data["k"]),
        valid=bool(data["valid"]),
        silhouette=data.get("silhouette"),
        silhouette_std=data.get("silhouette_std"),
        davies_bouldin=db,
        composite=data.get("composite"),
        cluster_sizes=tuple(data.get("cluster_sizes", ())),
        diagnostics=list(data.get("diagnostics", [])),
    )


def write_candidates(path, candidates: Sequence[ClusteringCandidate]) -> None:
    Path(path).write_text(json.dumps([candidate_to_dict(c) for c in candidates], indent=2), encoding="utf-8")


def read_candidates(path) -> List[ClusteringCandidate]:
    try:
        return [candidate_from_dict(item) for item in json.loads(Path(path).read_text(encoding="utf-8"))]
    except (json.JSONDecodeError, KeyError, TypeError) as e:
        raise ClusteringError(f"{path}: malformed candidate report ({e})") from e


def write_dendrogram(path, dendrogram: Dendrogram) -> None:
    Path(path).write_text(json.dumps(dendrogram.to_dict()), encoding="utf-8")


def read_dendrogram(path) -> Dendrogram:
    try:
        return Dendrogram.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
    except json.JSONDecodeError as e:
        raise ClusteringError(f"{path}: malformed dendrogram ({e})") from e
