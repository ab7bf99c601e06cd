import json
import random

import numpy as np
import pytest

from feclustre.errors import ConfigError, SelectionError
from feclustre.stages.cluster.linkage import average_linkage
from feclustre.stages.cluster.models import ClusteringCandidate
from feclustre.stages.cluster.report import write_candidates
from feclustre.stages.cluster.sweep import sweep
from feclustre.stages.embed.affinity import affinity
from feclustre.stages.embed.models import EmbeddingMatrix
from feclustre.stages.select.selection import SelectionConfig, SizePenalty, Strategy, balanced_score, select
from feclustre.stages.select.tools.tools import select_candidate

N = 100


def candidate(threshold, k, silhouette, db=1.0, largest=None, valid=True):
    """Candidate over N points with k clusters; the first cluster holds `largest` points."""
    largest = largest or N - (k - 1)
    sizes = [largest] + [1] * (k - 2) + [N - largest - (k - 2)] if k > 1 else [N]
    assignment = tuple(i for i, size in enumerate(sizes) for _ in range(size))
    if not valid:
        return ClusteringCandidate(threshold=threshold, assignment=assignment, k=k, valid=False,
                                   cluster_sizes=tuple(sizes))
    return ClusteringCandidate(threshold=threshold, assignment=assignment, k=k, valid=True, silhouette=silhouette,
                               silhouette_std=0.0, davies_bouldin=db, composite=0.5, cluster_sizes=tuple(sizes))


def test_single_valid_candidate_wins_everywhere():
    only = candidate(0.4, 3, 0.1)
    pool = [candidate(0.1, 100, None, valid=False), only, candidate(0.9, 1, None, valid=False)]
    for strategy in Strategy:
        assert select(pool, config=SelectionConfig(strategy=strategy)) is only


def test_silhouette_strategy_takes_the_highest():
    low, high = candidate(0.2, 4, 0.2), candidate(0.3, 6, 0.3)
    assert select([low, high], config=SelectionConfig(strategy=Strategy.SILHOUETTE)) is high


def test_silhouette_ties_prefer_fewer_clusters_then_lower_threshold():
    a, b, c = candidate(0.3, 6, 0.3), candidate(0.4, 4, 0.3), candidate(0.35, 4, 0.3)
    assert select([a, b, c], config=SelectionConfig(strategy=Strategy.SILHOUETTE)) is c


def test_conservative_prefers_fewer_clusters_within_margin():
    sharp, coarse = candidate(0.2, 40, 0.30), candidate(0.6, 10, 0.27)
    config = SelectionConfig(strategy=Strategy.CONSERVATIVE, stability_margin=0.05)
    assert select([sharp, coarse], config=config) is coarse
    tight = SelectionConfig(strategy=Strategy.CONSERVATIVE, stability_margin=0.01)
    assert select([sharp, coarse], config=tight) is sharp


def test_balanced_penalizes_dominant_cluster():
    dominant = candidate(0.5, 3, 0.35, largest=90)
    even = candidate(0.4, 3, 0.33, largest=40)
    config = SelectionConfig(strategy=Strategy.BALANCED, alpha=0.25, gamma=0.25)
    assert balanced_score(even, config) > balanced_score(dominant, config)
    assert select([dominant, even], config=config) is even


def test_every_strategy_returns_a_valid_member_regardless_of_order():
    rng = random.Random(11)
    pool = [candidate(round(0.1 + 0.05 * i, 2), k, rng.uniform(-0.2, 0.8), rng.uniform(0.2, 3.0))
            for i, k in enumerate([60, 40, 25, 12, 8, 5, 3, 2])]
    pool += [candidate(0.55, 100, None, valid=False)]
    for strategy in Strategy:
        config = SelectionConfig(strategy=strategy)
        chosen = select(pool, config=config)
        assert chosen.valid and chosen in pool
        for shift in range(1, len(pool)):
            assert select(pool[shift:] + pool[:shift], config=config) is chosen


def test_no_valid_candidate_raises():
    with pytest.raises(SelectionError):
        select([candidate(0.1, 100, None, valid=False)])


def test_unimplemented_size_penalty_rejected():
    with pytest.raises(ConfigError):
        SelectionConfig(size_penalty=SizePenalty.VARIANCE).validate()


def test_balanced_recovers_planted_clusters(planted_embeddings):
    candidates = sweep(planted_embeddings, average_linkage(affinity(planted_embeddings)))
    chosen = select(candidates, config=SelectionConfig(strategy=Strategy.BALANCED))
    assert chosen.k == 3
    assert chosen.silhouette > 0.5


def test_select_tool_writes_report(tmp_path):
    pool = [candidate(0.2, 4, 0.2), candidate(0.3, 6, 0.3), candidate(0.8, 1, None, valid=False)]
    write_candidates(tmp_path / "candidates.json", pool)
    result = select_candidate(str(tmp_path / "candidates.json"), str(tmp_path / "selection.json"),
                              strategy="silhouette")
    assert result["status"] == "success"
    assert result["threshold"] == 0.3 and result["k"] == 6
    report = json.loads((tmp_path / "selection.json").read_text())
    assert report["strategy"] == "silhouette"
    assert report["chosen"]["k"] == 6
    assert [c["score"] for c in report["candidates"]] == [0.2, 0.3, None]


def test_select_tool_reports_errors(tmp_path):
    result = select_candidate(str(tmp_path / "missing.json"), str(tmp_path / "selection.json"))
    assert result["status"] == "error"
    assert not (tmp_path / "selection.json").exists()


def test_choice_survives_orthogonal_rotation():
    rng = np.random.default_rng(42)
    for trial in range(5):
        centers = rng.normal(size=(4, 8))
        points = np.repeat(centers, 12, axis=0) + 0.25 * rng.normal(size=(48, 8))
        points /= np.linalg.norm(points, axis=1, keepdims=True)
        rotation, _ = np.linalg.qr(rng.normal(size=(8, 8)))
        ids = tuple(f"f{i}" for i in range(48))
        original = EmbeddingMatrix(ids=ids, vectors=points, provider_tag="test")
        rotated = EmbeddingMatrix(ids=ids, vectors=points @ rotation, provider_tag="test")
        before = sweep(original, average_linkage(affinity(original)))
        after = sweep(rotated, average_linkage(affinity(rotated)))
        for strategy in Strategy:
            config = SelectionConfig(strategy=strategy)
            a, b = select(before, config=config), select(after, config=config)
            assert (a.threshold, a.k) == (b.threshold, b.k)
            assert a.silhouette == pytest.approx(b.silhouette, abs=1e-9)
