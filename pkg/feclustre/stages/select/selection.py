"""Pick one clustering candidate under a user-selected strategy."""
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence

from ...config.settings import DEFAULT_ALPHA, DEFAULT_GAMMA, DEFAULT_STABILITY_MARGIN, DEFAULT_STRATEGY
from ...errors import ConfigError, SelectionError
from ..cluster.models import ClusteringCandidate

logger = logging.getLogger(__name__)


class Strategy(str, Enum):
    SILHOUETTE = "silhouette"
    BALANCED = "balanced"
    CONSERVATIVE = "conservative"


class SizePenalty(str, Enum):
    MAX = "max"
    VARIANCE = "variance"
    SINGLETONS = "singletons"


@dataclass(frozen=True)
class SelectionConfig:
    strategy: Strategy = Strategy(DEFAULT_STRATEGY)
    alpha: float = DEFAULT_ALPHA
    gamma: float = DEFAULT_GAMMA
    stability_margin: float = DEFAULT_STABILITY_MARGIN
    size_penalty: SizePenalty = SizePenalty.MAX

    def validate(self) -> None:
        try:
            Strategy(self.strategy)
        except ValueError as e:
            raise ConfigError(f"unknown selection strategy {self.strategy!r}") from e
        if self.alpha < 0 or self.gamma < 0:
            raise ConfigError("selection weights alpha and gamma must be >= 0")
        if not 0.0 <= self.stability_margin <= 1.0:
            raise ConfigError(f"stability margin must be in [0, 1], got {self.stability_margin}")
        if SizePenalty(self.size_penalty) != SizePenalty.MAX:
            raise ConfigError(f"size penalty {SizePenalty(self.size_penalty).value!r} is not implemented; use 'max'")


def size_penalty(candidate: ClusteringCandidate, sizes: Optional[Sequence[int]] = None) -> float:
    """Largest cluster as a share of all features."""
    sizes = list(sizes if sizes is not None else candidate.cluster_sizes)
    return max(sizes) / candidate.n


def balanced_score(candidate: ClusteringCandidate, config: SelectionConfig,
                   sizes: Optional[Sequence[int]] = None) -> float:
    return ((candidate.silhouette + 1.0) / 2.0
            + 1.0 / (1.0 + candidate.davies_bouldin)
            - config.alpha * candidate.k / candidate.n
            - config.gamma * size_penalty(candidate, sizes))


def score_candidates(candidates: Sequence[ClusteringCandidate], config: SelectionConfig,
                     sizes: Optional[Dict[float, Sequence[int]]] = None) -> List[Optional[float]]:
    """Strategy score per candidate (None for invalid ones)."""
    strategy = Strategy(config.strategy)
    scores: List[Optional[float]] = []
    for candidate in candidates:
        if not candidate.valid:
            scores.append(None)
        elif strategy == Strategy.BALANCED:
            scores.append(balanced_score(candidate, config, (sizes or {}).get(candidate.threshold)))
        else:
            scores.append(candidate.silhouette)
    return scores


def select(candidates: Sequence[ClusteringCandidate],
           sizes: Optional[Dict[float, Sequence[int]]] = None,
           config: SelectionConfig = SelectionConfig()) -> ClusteringCandidate:
    """Choose a valid candidate.

    `sizes` optionally maps threshold to cluster sizes; each candidate's own
    `cluster_sizes` is used otherwise.

    Raises:
        SelectionError: no valid candidate.
    """
    config.validate()
    strategy = Strategy(config.strategy)
    scored = [(c, s) for c, s in zip(candidates, score_candidates(candidates, config, sizes)) if c.valid]
    if not scored:
        raise SelectionError("no valid clustering candidate to select from")

    if strategy == Strategy.CONSERVATIVE:
        best_silhouette = max(c.silhouette for c, _ in scored)
        pool = [c for c, _ in scored if c.silhouette >= best_silhouette - config.stability_margin]
        chosen = min(pool, key=lambda c: (c.k, -c.threshold))
    else:
        chosen = min(scored, key=lambda pair: (-pair[1], pair[0].k, pair[0].threshold))[0]
    logger.info(f"Strategy {strategy.value} selected threshold {chosen.threshold} (k={chosen.k})")
    return chosen


def selection_report(candidates: Sequence[ClusteringCandidate], chosen: ClusteringCandidate,
                     config: SelectionConfig) -> dict:
    scores = score_candidates(candidates, config)
    return {
        "strategy": Strategy(config.strategy).value,
        "alpha": config.alpha,
        "gamma": config.gamma,
        "stability_margin": config.stability_margin,
        "chosen_threshold": chosen.threshold,
        "chosen_k": chosen.k,
        "candidates": [
            {"threshold": c.threshold, "k": c.k, "valid": c.valid, "score": s}
            for c, s in zip(candidates, scores)
        ],
    }
