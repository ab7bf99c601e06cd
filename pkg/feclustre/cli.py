"""Command-line entry point: one subcommand per stage plus `run`."""
import argparse
import json
import logging
import sys
from typing import List, Optional

from .config.pipeline_config import FeatureInput, PipelineConfig, apply_overrides, load_config
from .config.settings import LOG_LEVEL
from .errors import FeClustError
from .pipeline import STAGES, run_pipeline, run_stage

logger = logging.getLogger(__name__)

SOURCES = ("syntactic", "llm", "hybrid", "gold")


def _feature_input(value: str) -> FeatureInput:
    path, _, source = value.rpartition(":")
    if path and source in SOURCES:
        return FeatureInput(path=path, source=source)
    return FeatureInput(path=value)


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="pipeline config JSON")
    common.add_argument("--output-dir", help="directory for all artifacts")
    common.add_argument("--offline", action="store_true", default=None,
                        help="stub labeler and hashing embedder, no network")
    common.add_argument("--seed", type=int, help="seed for sampling and the hashing embedder")
    common.add_argument("--strategy", choices=("silhouette", "balanced", "conservative"))
    common.add_argument("--sigma", type=float, help="taxonomy merge similarity threshold")
    common.add_argument("--reviews", help="raw reviews JSONL")
    common.add_argument("--features", action="append", type=_feature_input, metavar="PATH[:SOURCE]",
                        help="extractor output JSONL; repeat to merge several")
    common.add_argument("--gold", help="gold annotations JSONL")
    common.add_argument("--sample-size", type=int, help="stratified sample size")
    common.add_argument("--embed-mode", choices=("hashing", "remote", "local"))
    common.add_argument("--log-level", default=None, help="logging level (default from FECLUST_LOG_LEVEL)")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="feclustre", description="Cluster app-review features into taxonomies.")
    subcommands = parser.add_subparsers(dest="command", required=True)
    common = _common_options()
    subcommands.add_parser("run", parents=[common], help="run every stage")
    for stage in STAGES:
        subcommands.add_parser(stage, parents=[common], help=f"run the {stage} stage only")
    return parser


def resolve_config(args: argparse.Namespace) -> PipelineConfig:
    config = load_config(args.config)
    return apply_overrides(config, {
        "output_dir": args.output_dir,
        "offline": args.offline,
        "seed": args.seed,
        "selection.strategy": args.strategy,
        "sigma": args.sigma,
        "inputs.reviews": args.reviews,
        "inputs.features": args.features,
        "inputs.gold": args.gold,
        "corpus.sample_size": args.sample_size,
        "embedding.mode": args.embed_mode,
    })


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=(args.log_level or LOG_LEVEL).upper(),
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        config = resolve_config(args)
        if args.command == "run":
            manifest = run_pipeline(config)
            print(json.dumps({"status": "success", "config_hash": manifest["config_hash"],
                              "artifacts": len(manifest["artifacts"])}))
            return 0
        config.effective().check(check_paths=True)
        result = run_stage(config, args.command)
    except FeClustError as e:
        logger.error(str(e))
        return 1
    print(result.get("message", result["status"]))
    return 1 if result["status"] == "error" else 0


if __name__ == "__main__":
    sys.exit(main())
