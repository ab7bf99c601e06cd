import json
import logging
from pathlib import Path
from typing import Any, Dict

from ....errors import FeClustError
from ..selection import SelectionConfig, SizePenalty, Strategy, select, selection_report
from ...cluster.report import candidate_to_dict, read_candidates

logger = logging.getLogger(__name__)


def select_candidate(candidates_path: str, output_path: str, strategy: str = "balanced",
                     alpha: float = 0.25, gamma: float = 0.25, stability_margin: float = 0.05,
                     size_penalty: str = "max") -> Dict[str, Any]:
    """
    Pick the clustering candidate to build taxonomies from.

    Args:
        candidates_path: Candidate report JSON
        output_path: Where the selection report goes
        strategy: silhouette, balanced or conservative
        alpha: Cluster-count penalty weight (balanced)
        gamma: Largest-cluster penalty weight (balanced)
        stability_margin: Silhouette slack (conservative)
        size_penalty: Cluster-size penalty form (only "max")

    Returns:
        Dict with status, chosen threshold and cluster count
    """
    try:
        config = SelectionConfig(strategy=Strategy(strategy), alpha=alpha, gamma=gamma,
                                 stability_margin=stability_margin, size_penalty=SizePenalty(size_penalty))
        candidates = read_candidates(candidates_path)
        chosen = select(candidates, config=config)
        report = selection_report(candidates, chosen, config)
        report["chosen"] = candidate_to_dict(chosen)
        Path(output_path).write_text(json.dumps(report, indent=2), encoding="utf-8")
        return {
            "status": "success",
            "message": f"{config.strategy.value} strategy chose t={chosen.threshold} with k={chosen.k}",
            "threshold": chosen.threshold,
            "k": chosen.k,
            "artifacts": [output_path],
        }
    except (FeClustError, OSError, ValueError) as e:
        logger.error(f"Selection failed: {e}")
        return {"status": "error", "message": f"Failed to select a candidate: {e}"}
