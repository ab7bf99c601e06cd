import itertools
import json
import random
from pathlib import Path

import pytest

from feclustre.errors import ConfigError
from feclustre.stages.cluster.linkage import average_linkage
from feclustre.stages.cluster.sweep import sweep
from feclustre.stages.corpus.features import build_feature_set
from feclustre.stages.corpus.io import surface_apps
from feclustre.stages.corpus.models import DedupScope, Feature, FeatureSource, Review
from feclustre.stages.corpus.tools.tools import extract_and_merge
from feclustre.stages.embed.affinity import affinity
from feclustre.stages.eval.matching import MatchConfig, align_review, features_match
from feclustre.stages.eval.models import CorrectnessRow, QualityReport
from feclustre.stages.eval.report import quality_report, read_report, render_report, report_schema, write_report
from feclustre.stages.eval.scoring import (average_rows, correctness_table, evaluate_corpus, f_beta, prf,
                                           render_correctness_table)
from feclustre.stages.eval.tools.tools import evaluate_extractors
from feclustre.stages.select.selection import select
from feclustre.stages.taxonomy.models import LabelerConfig
from feclustre.stages.taxonomy.scoring import coherence_score, top_coherent_by_app
from feclustre.stages.taxonomy.tagging import tag_clusters

from conftest import write_jsonl

BETA = 2.385
TABLE = json.loads((Path(__file__).parent / "fixtures" / "table1.json").read_text())
WORDS = ["dark", "mode", "voice", "input", "chat", "export", "share", "theme"]


def max_bipartite(predicted, gold, n_slack):
    best = 0
    for size in range(min(len(predicted), len(gold)), 0, -1):
        for chosen in itertools.permutations(range(len(gold)), size):
            for rows in itertools.combinations(range(len(predicted)), size):
                if all(features_match(predicted[r], gold[c], n_slack) for r, c in zip(rows, chosen)):
                    return size
    return best


def test_features_match_examples():
    assert features_match("dark mode", "dark mode", 0)
    assert features_match("download", "download stuff", 1)
    assert not features_match("download", "download stuff", 0)
    assert not features_match("voice input", "input voice", 0)
    assert features_match("Dark Mode", "dark mode", 0)
    assert features_match("mode dark theme", "dark", 2)
    assert not features_match("mode dark theme", "dark", 1)


def test_features_match_symmetric_and_monotone():
    rng = random.Random(8)
    for _ in range(1000):
        p = " ".join(rng.choices(WORDS[:3], k=rng.randint(1, 4)))
        g = " ".join(rng.choices(WORDS[:3], k=rng.randint(1, 4)))
        for n in range(3):
            assert features_match(p, g, n) == features_match(g, p, n)
            if features_match(p, g, n):
                assert features_match(p, g, n + 1)


def test_align_review_examples():
    config = MatchConfig(n_slack=1)
    assert align_review(["a", "b"], ["a", "b"], config) == [(0, 0), (1, 1)]
    assert align_review(["a"], [], config) == []
    assert align_review(["x", "x y"], ["x y"], config) == [(0, 0)]
    assert max_bipartite(["x", "x y"], ["x y"], 1) == 1


def test_align_review_consumes_gold_once():
    rng = random.Random(21)
    for _ in range(200):
        predicted = [" ".join(rng.choices(WORDS[:3], k=rng.randint(1, 3))) for _ in range(rng.randint(0, 4))]
        gold = [" ".join(rng.choices(WORDS[:3], k=rng.randint(1, 3))) for _ in range(rng.randint(0, 4))]
        pairs = align_review(predicted, gold, MatchConfig(n_slack=1))
        assert len({j for _, j in pairs}) == len(pairs)
        assert len(pairs) <= min(len(predicted), len(gold))
        assert all(features_match(predicted[i], gold[j], 1) for i, j in pairs)
        assert len(pairs) <= max_bipartite(predicted, gold, 1)


def test_match_config_validation():
    with pytest.raises(ConfigError):
        MatchConfig(n_slack=-1)
    with pytest.raises(ConfigError):
        MatchConfig(beta=0.0)


def test_prf_examples():
    assert prf(0, 0, 0) == (0.0, 0.0, 0.0)
    assert prf(3, 4, 6, BETA)[:2] == (0.75, 0.5)
    assert f_beta(0.472, 0.746, BETA) == pytest.approx(0.686, abs=1e-3)
    assert f_beta(0.722, 0.661, BETA) == pytest.approx(0.669, abs=1e-3)
    for x in (0.1, 0.37, 0.9):
        assert f_beta(x, x, BETA) == pytest.approx(x)
        assert f_beta(x, x, 0.5) == pytest.approx(x)


@pytest.mark.parametrize("row", [r for r in TABLE if r["dataset"] != "Avg."],
                         ids=lambda r: f"{r['dataset']}-{r['extractor']}-n{r['n_slack']}")
def test_published_f_cells_recompute(row):
    assert f_beta(row["precision"], row["recall"], BETA) == pytest.approx(row["f_beta"], abs=1e-3)


def test_published_average_rows_are_cell_means():
    rows = [CorrectnessRow(**r) for r in TABLE if r["dataset"] != "Avg."]
    published = {(r["extractor"], r["n_slack"]): r for r in TABLE if r["dataset"] == "Avg."}
    averaged = average_rows(rows)
    assert len(averaged) == 9
    for row in averaged:
        expected = published[(row.extractor, row.n_slack)]
        for cell in ("precision", "recall", "f_beta"):
            assert getattr(row, cell) == pytest.approx(expected[cell], abs=1e-3)


def test_f_beta_bounded_and_recall_weighted():
    rng = random.Random(3)
    for _ in range(1000):
        p, r = rng.random(), rng.random()
        f = f_beta(p, r, BETA)
        assert min(p, r) <= f <= max(p, r)
        if p - r > 1e-9:
            assert abs(f - r) < abs(f - p)
        elif r > p:
            assert f >= f_beta(p, r, 1.0) - 1e-12


def test_matched_count_monotone_in_slack():
    rng = random.Random(13)
    for _ in range(1000):
        reviews = [f"r{i}" for i in range(rng.randint(1, 5))]
        predicted = {r: [" ".join(rng.choices(WORDS[:4], k=rng.randint(1, 3))) for _ in range(rng.randint(1, 4))]
                     for r in reviews}
        gold = {r: [" ".join(rng.choices(WORDS[:4], k=rng.randint(1, 3)))] for r in reviews}
        matched = [evaluate_corpus(predicted, gold, MatchConfig(n_slack=n)).matched for n in range(3)]
        assert matched == sorted(matched)


def test_evaluate_corpus_micro_averages():
    predicted = {"r1": ["dark mode", "voice"], "r2": ["export chat"], "r3": ["spam"]}
    gold = {"r1": ["dark mode"], "r2": ["export chat history"], "r4": ["share"]}
    exact = evaluate_corpus(predicted, gold, MatchConfig(n_slack=0, beta=BETA))
    assert (exact.matched, exact.predicted_total, exact.gold_total) == (1, 4, 3)
    assert exact.precision == 0.25 and exact.recall == pytest.approx(1 / 3)
    slack = evaluate_corpus(predicted, gold, MatchConfig(n_slack=1, beta=BETA))
    assert slack.matched == 2
    assert [r.review_id for r in slack.reviews] == ["r1", "r2", "r3", "r4"]


def test_correctness_table_and_rendering():
    predicted = {"A": {"syntactic": {"r1": ["dark mode"]}, "llm": {"r1": ["dark"]}}}
    gold = {"A": {"r1": ["dark mode"]}}
    rows = correctness_table(predicted, gold, (0, 1, 2), BETA)
    assert [(r.extractor, r.n_slack) for r in rows] == [("syntactic", 0), ("syntactic", 1), ("syntactic", 2),
                                                        ("llm", 0), ("llm", 1), ("llm", 2)]
    assert [r.f_beta for r in rows if r.extractor == "llm"] == [0.0, 1.0, 1.0]
    text = render_correctness_table(rows + average_rows(rows))
    assert "n=0" in text and "n=2" in text
    assert "Avg." in text


def test_evaluate_extractors_tool(fixture_corpus, tmp_path):
    result = evaluate_extractors(str(fixture_corpus["gold"]),
                                 [("syntactic", str(fixture_corpus["syntactic"])), ("llm", str(fixture_corpus["llm"]))],
                                 str(tmp_path / "eval.json"), dataset="fixture", text_path=str(tmp_path / "eval.txt"))
    assert result["status"] == "success"
    rows = {(r["extractor"], r["n_slack"]): r for r in json.loads((tmp_path / "eval.json").read_text())}
    assert rows[("syntactic", 0)]["f_beta"] == pytest.approx(1.0)
    assert rows[("llm", 0)]["precision"] == pytest.approx(1.0)
    assert rows[("llm", 0)]["recall"] == pytest.approx(0.5)
    assert rows[("llm", 0)]["f_beta"] == pytest.approx(f_beta(1.0, 0.5, BETA))
    assert (tmp_path / "eval.txt").read_text().startswith("Dataset")


def test_evaluate_extractors_reports_missing_gold(tmp_path):
    result = evaluate_extractors(str(tmp_path / "nope.jsonl"), [], str(tmp_path / "eval.json"))
    assert result["status"] == "error"


@pytest.fixture
def planted_report(planted_surfaces, planted_embeddings, hashing_provider):
    dendrogram = average_linkage(affinity(planted_embeddings))
    candidates = sweep(planted_embeddings, dendrogram)
    chosen = select(candidates)
    taxonomies, _ = tag_clusters(chosen, dendrogram, planted_surfaces, LabelerConfig(), provider=hashing_provider)
    coherence = {t.taxonomy_id: coherence_score(t, planted_embeddings) for t in taxonomies}
    correctness = [CorrectnessRow(**r) for r in TABLE if r["dataset"] != "Avg."]
    return quality_report(candidates, chosen, taxonomies, coherence, correctness=correctness, top_n=2), coherence


def test_quality_report_document(planted_report, tmp_path):
    report, coherence = planted_report
    assert report.chosen_k == 3 and report.taxonomy_count == 3
    assert report.empty_taxonomies == 0
    assert len(report.candidates) == 17
    schema = report_schema()
    assert set(schema["required"]) <= set(report.model_dump())

    write_report(tmp_path / "report.json", report)
    assert read_report(tmp_path / "report.json") == report
    assert QualityReport.model_validate(json.loads((tmp_path / "report.json").read_text())) == report

    for row in report.correctness:
        assert f_beta(row.precision, row.recall, BETA) == pytest.approx(row.f_beta, abs=1e-3)

    expected = sorted(coherence, key=lambda tid: (-coherence[tid], tid))[:2]
    assert [top.taxonomy_id for top in report.top_clusters] == expected

    text = render_report(report)
    assert "Top clusters by coherence:" in text
    assert "Dataset" in text


def test_greedy_alignment_can_lose_a_match_with_more_slack():
    predicted, gold = ["a", "a b"], ["a b c", "a z"]
    assert len(align_review(predicted, gold, MatchConfig(n_slack=1))) == 2
    assert len(align_review(predicted, gold, MatchConfig(n_slack=2))) == 1
    assert max_bipartite(predicted, gold, 2) == 2


def test_hybrid_row_scores_every_mention(tmp_path):
    syntactic = write_jsonl(tmp_path / "syn.jsonl", [{"surface": "dark mode", "review_id": "r1"},
                                                     {"surface": "dark mode", "review_id": "r2"}])
    llm = write_jsonl(tmp_path / "llm.jsonl", [{"surface": "voice input", "review_id": "r2"}])
    gold = write_jsonl(tmp_path / "gold.jsonl", [{"review_id": "r1", "features": ["dark mode"]},
                                                 {"review_id": "r2", "features": ["dark mode", "voice input"]}])
    by_review = tmp_path / "by_review.jsonl"
    assert extract_and_merge([(str(syntactic), "syntactic"), (str(llm), "llm")], str(tmp_path / "features.jsonl"),
                             review_output_path=str(by_review))["status"] == "success"
    result = evaluate_extractors(str(gold), [("syntactic", str(syntactic)), ("llm", str(llm)),
                                             ("hybrid", str(by_review))],
                                 str(tmp_path / "eval.json"), n_slack=(0,))
    recall = {row["extractor"]: row["recall"] for row in result["rows"]}
    assert recall["syntactic"] == pytest.approx(2 / 3)
    assert recall["llm"] == pytest.approx(1 / 3)
    assert recall["hybrid"] == pytest.approx(1.0)
    assert recall["hybrid"] >= max(recall["syntactic"], recall["llm"])


def test_evaluation_is_limited_to_given_reviews(tmp_path):
    predicted = write_jsonl(tmp_path / "syn.jsonl", [{"surface": "dark mode", "review_id": "r1"},
                                                     {"surface": "noise", "review_id": "r3"}])
    gold = write_jsonl(tmp_path / "gold.jsonl", [{"review_id": "r1", "features": ["dark mode"]},
                                                 {"review_id": "r2", "features": ["voice input"]}])
    reviews = write_jsonl(tmp_path / "reviews.jsonl", [{"review_id": "r1", "app_id": "a", "body": "Dark mode"}])
    everything = evaluate_extractors(str(gold), [("syntactic", str(predicted))], str(tmp_path / "all.json"),
                                     n_slack=(0,))
    assert (everything["rows"][0]["precision"], everything["rows"][0]["recall"]) == (0.5, 0.5)
    scoped = evaluate_extractors(str(gold), [("syntactic", str(predicted))], str(tmp_path / "scoped.json"),
                                 n_slack=(0,), reviews_path=str(reviews))
    assert (scoped["rows"][0]["precision"], scoped["rows"][0]["recall"]) == (1.0, 1.0)


def test_surface_apps_follow_review_provenance():
    reviews = [Review("r1", "app-a", "x"), Review("r2", "app-b", "y"), Review("r3", "app-a", "z")]
    features = [Feature.from_raw(s, r, FeatureSource.SYNTACTIC)
                for r, s in [("r1", "dark mode"), ("r2", "dark mode"), ("r3", "voice input"), ("r9", "orphan")]]
    apps = surface_apps(reviews, build_feature_set(features, DedupScope.REVIEW))
    assert apps == {"dark mode": {"app-a", "app-b"}, "voice input": {"app-a"}}


def test_top_clusters_are_ranked_per_app(planted_surfaces, planted_embeddings, hashing_provider, tmp_path):
    dendrogram = average_linkage(affinity(planted_embeddings))
    candidates = sweep(planted_embeddings, dendrogram)
    chosen = select(candidates)
    taxonomies, _ = tag_clusters(chosen, dendrogram, planted_surfaces, LabelerConfig(), provider=hashing_provider)
    coherence = {t.taxonomy_id: coherence_score(t, planted_embeddings) for t in taxonomies}
    apps = {s: ({"a"} if i < 20 else {"b"} if i < 40 else {"a", "c"}) for i, s in enumerate(planted_surfaces)}

    by_app = top_coherent_by_app(taxonomies, planted_embeddings, apps, top_n=5)
    assert list(by_app) == ["a", "b", "c"]
    assert [len(by_app[app]) for app in by_app] == [2, 1, 1]
    for app, rows in by_app.items():
        assert [r["coherence"] for r in rows] == sorted((r["coherence"] for r in rows), reverse=True)
        assert all(app in apps[m] for r in rows for m in r["members"])
    only_c = by_app["c"][0]
    assert only_c["coherence"] == pytest.approx(coherence[only_c["taxonomy_id"]])

    report = quality_report(candidates, chosen, taxonomies, coherence, top_n=2, top_by_app=by_app)
    assert [group.app_id for group in report.top_clusters_by_app] == ["a", "b", "c"]
    write_report(tmp_path / "report.json", report)
    assert read_report(tmp_path / "report.json") == report
    assert "Top clusters for b:" in render_report(report)
