"""Stage orchestration over a single output directory.

Every stage reads and writes the files listed in ARTIFACTS, so running the
stages one by one from the CLI gives the same artifacts as `run_pipeline`.
"""
import json
import logging
import time
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

from .config.pipeline_config import PipelineConfig, config_hash, file_digest
from .errors import ConfigError, StageError
from .stages.cluster.tools.tools import cluster_embeddings
from .stages.corpus.tools.tools import extract_and_merge, ingest_corpus, sample_corpus
from .stages.embed.tools.tools import embed_feature_file
from .stages.eval.tools.tools import build_quality_report, evaluate_extractors
from .stages.select.tools.tools import select_candidate
from .stages.taxonomy.tools.tools import export_taxonomies, merge_tagged_taxonomies, tag_selected_clusters

logger = logging.getLogger(__name__)

ARTIFACTS = {
    "reviews": "reviews.clean.jsonl",
    "sample": "reviews.sample.jsonl",
    "features": "features.jsonl",
    "review_features": "features.by_review.jsonl",
    "embeddings": "embeddings.jsonl",
    "dendrogram": "dendrogram.json",
    "candidates": "candidates.json",
    "selection": "selection.json",
    "tagged": "taxonomies.tagged.json",
    "diagnostics": "labeling_diagnostics.json",
    "taxonomies": "taxonomies.json",
    "dot": "dot",
    "eval": "eval_report.json",
    "eval_text": "eval_report.txt",
    "report": "quality_report.json",
    "report_text": "quality_report.txt",
    "manifest": "manifest.json",
}

STAGES = ("ingest", "sample", "extract-merge", "embed", "cluster", "select", "tag", "merge",
          "export-dot", "eval", "report")


class Workspace:
    """Artifact paths inside one output directory."""

    def __init__(self, output_dir: str):
        self.root = Path(output_dir)

    def path(self, name: str) -> str:
        return str(self.root / ARTIFACTS[name])

    def reviews_for_features(self, config: PipelineConfig) -> Optional[str]:
        if not config.inputs.reviews:
            return None
        return self.path("sample") if config.corpus.sample_size is not None else self.path("reviews")


def _feature_inputs(config: PipelineConfig) -> List[Tuple[str, str]]:
    return [(f.path, f.source) for f in config.inputs.features]


def stage_call(config: PipelineConfig, stage: str) -> Optional[Callable[[], Dict[str, Any]]]:
    """The tool invocation for `stage`, or None when the config skips it."""
    ws = Workspace(config.output_dir)
    emb, lab, sel = config.embedding, config.labeler, config.selection
    if stage == "ingest":
        if not config.inputs.reviews:
            return None
        return lambda: ingest_corpus(config.inputs.reviews, ws.path("reviews"))
    if stage == "sample":
        if not config.inputs.reviews or config.corpus.sample_size is None:
            return None
        return lambda: sample_corpus(ws.path("reviews"), ws.path("sample"), config.corpus.sample_size, config.seed)
    if stage == "extract-merge":
        return lambda: extract_and_merge(_feature_inputs(config), ws.path("features"), config.corpus.dedup_scope,
                                         ws.reviews_for_features(config), config.inputs.extractor_endpoint,
                                         config.inputs.extractor_source, ws.path("review_features"))
    if stage == "embed":
        return lambda: embed_feature_file(ws.path("features"), ws.path("embeddings"), emb.mode, emb.dim,
                                          config.seed, emb.model, emb.endpoint, emb.cache_path)
    if stage == "cluster":
        c = config.clustering
        return lambda: cluster_embeddings(ws.path("embeddings"), ws.path("dendrogram"), ws.path("candidates"),
                                          c.linkage, c.start, c.stop, c.step, c.max_workers)
    if stage == "select":
        return lambda: select_candidate(ws.path("candidates"), ws.path("selection"), sel.strategy, sel.alpha,
                                        sel.gamma, sel.stability_margin, sel.size_penalty)
    if stage == "tag":
        return lambda: tag_selected_clusters(
            ws.path("embeddings"), ws.path("dendrogram"), ws.path("selection"), ws.path("tagged"),
            labeler_mode=lab.mode, model=lab.model, api_base=lab.api_base, max_label_tokens=lab.max_label_tokens,
            temperature=lab.temperature, few_shot_path=lab.few_shot_path, min_subtree_size=lab.min_subtree_size,
            embed_mode=emb.mode, embed_dim=emb.dim, seed=config.seed, embed_model=emb.model,
            embed_endpoint=emb.endpoint, diagnostics_path=ws.path("diagnostics"),
        )
    if stage == "merge":
        return lambda: merge_tagged_taxonomies(ws.path("tagged"), ws.path("taxonomies"), config.sigma)
    if stage == "export-dot":
        return lambda: export_taxonomies(ws.path("taxonomies"), ws.path("dot"), str(ws.root))
    if stage == "eval":
        if not config.inputs.gold:
            return None
        predictions = [(f.source, f.path) for f in config.inputs.features] + [("hybrid", ws.path("review_features"))]
        return lambda: evaluate_extractors(config.inputs.gold, predictions, ws.path("eval"),
                                           n_slack=config.eval.n_slack, beta=config.eval.beta,
                                           text_path=ws.path("eval_text"),
                                           reviews_path=ws.reviews_for_features(config))
    if stage == "report":
        return lambda: build_quality_report(
            ws.path("candidates"), ws.path("selection"), ws.path("taxonomies"), ws.path("embeddings"),
            ws.path("report"), ws.path("report_text"), sel.strategy, sel.alpha, sel.gamma, sel.stability_margin,
            correctness_path=ws.path("eval") if config.inputs.gold else None, top_n=config.eval.top_n,
            reviews_path=ws.reviews_for_features(config) if config.eval.per_app else None,
            review_features_path=ws.path("review_features") if config.eval.per_app else None,
        )
    raise ConfigError(f"unknown stage {stage!r}")


def run_stage(config: PipelineConfig, stage: str) -> Dict[str, Any]:
    """Run one stage; a skipped stage reports status "skipped"."""
    config = config.effective()
    call = stage_call(config, stage)
    if call is None:
        return {"status": "skipped", "message": f"{stage} is not configured"}
    Path(config.output_dir).mkdir(parents=True, exist_ok=True)
    result = call()
    if result.get("status") == "success":
        logger.info(f"[{stage}] {result.get('message', 'done')}")
    return result


def _artifact_digests(root: Path) -> Dict[str, str]:
    digests = {}
    for path in sorted(p for p in root.rglob("*") if p.is_file()):
        relative = path.relative_to(root).as_posix()
        if relative != ARTIFACTS["manifest"]:
            digests[relative] = file_digest(path)
    return digests


def _write_manifest(root: Path, manifest: Dict[str, Any]) -> None:
    (root / ARTIFACTS["manifest"]).write_text(json.dumps(manifest, indent=2, sort_keys=True), encoding="utf-8")


def run_pipeline(config: PipelineConfig) -> Dict[str, Any]:
    """Run every configured stage in order and write the run manifest.

    Raises:
        ConfigError: invalid config or missing inputs; nothing is written.
        StageError: a stage failed; the manifest is written with partial=true.
    """
    config = config.effective()
    config.check(check_paths=True)
    root = Path(config.output_dir)
    root.mkdir(parents=True, exist_ok=True)
    manifest: Dict[str, Any] = {
        "config_hash": config_hash(config),
        "seed": config.seed,
        "offline": config.offline,
        "providers": {
            "embedding": None,
            "labeler": config.labeler.mode if config.labeler.mode == "deterministic_stub"
            else f"{config.labeler.mode}:{config.labeler.model}",
        },
        "stages": {},
        "partial": False,
        "failed_stage": None,
        "timings": {},
    }
    for stage in STAGES:
        started = time.perf_counter()
        result = run_stage(config, stage)
        manifest["timings"][stage] = round(time.perf_counter() - started, 6)
        manifest["stages"][stage] = result["status"]
        if stage == "embed" and result["status"] == "success":
            manifest["providers"]["embedding"] = result["provider"]
        if result["status"] == "error":
            manifest["partial"] = True
            manifest["failed_stage"] = stage
            manifest["error"] = result.get("message")
            manifest["artifacts"] = _artifact_digests(root)
            _write_manifest(root, manifest)
            raise StageError(stage, result.get("message", "stage failed"))
    manifest["artifacts"] = _artifact_digests(root)
    _write_manifest(root, manifest)
    logger.info(f"Pipeline finished; manifest at {root / ARTIFACTS['manifest']}")
    return manifest
