"""The run configuration document: one JSON file, every field overridable."""
import hashlib
import json
from pathlib import Path
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from ..errors import ConfigError
from . import settings


class Section(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class FeatureInput(Section):
    path: str
    source: str = "syntactic"


class InputsConfig(Section):
    reviews: Optional[str] = None
    features: List[FeatureInput] = Field(default_factory=list)
    gold: Optional[str] = None
    extractor_endpoint: Optional[str] = None
    extractor_source: str = "llm"


class CorpusConfig(Section):
    sample_size: Optional[int] = None
    dedup_scope: str = "corpus"


class EmbeddingConfig(Section):
    mode: str = "hashing"
    model: Optional[str] = None
    endpoint: Optional[str] = None
    dim: int = settings.HASHING_DIM
    cache_path: Optional[str] = None


class ClusteringConfig(Section):
    linkage: str = "average"
    start: float = settings.SWEEP_START
    stop: float = settings.SWEEP_STOP
    step: float = settings.SWEEP_STEP
    max_workers: int = 4


class SelectionSettings(Section):
    strategy: str = settings.DEFAULT_STRATEGY
    alpha: float = settings.DEFAULT_ALPHA
    gamma: float = settings.DEFAULT_GAMMA
    stability_margin: float = settings.DEFAULT_STABILITY_MARGIN
    size_penalty: str = "max"


class LabelerSettings(Section):
    mode: str = "deterministic_stub"
    model: str = settings.DEFAULT_LLM_MODEL
    api_base: Optional[str] = None
    max_label_tokens: int = settings.MAX_LABEL_TOKENS
    temperature: float = settings.LABEL_TEMPERATURE
    few_shot_path: Optional[str] = None
    min_subtree_size: int = settings.MIN_SUBTREE_SIZE
    structural_weight: float = 0.0


class EvalSettings(Section):
    beta: float = settings.DEFAULT_BETA
    n_slack: List[int] = Field(default_factory=lambda: list(settings.DEFAULT_N_SLACK))
    top_n: int = 5
    per_app: bool = True


class PipelineConfig(Section):
    inputs: InputsConfig = Field(default_factory=InputsConfig)
    corpus: CorpusConfig = Field(default_factory=CorpusConfig)
    embedding: EmbeddingConfig = Field(default_factory=EmbeddingConfig)
    clustering: ClusteringConfig = Field(default_factory=ClusteringConfig)
    selection: SelectionSettings = Field(default_factory=SelectionSettings)
    labeler: LabelerSettings = Field(default_factory=LabelerSettings)
    eval: EvalSettings = Field(default_factory=EvalSettings)
    sigma: float = settings.DEFAULT_SIGMA
    seed: int = 0
    offline: bool = False
    output_dir: str = "feclustre-out"

    def effective(self) -> "PipelineConfig":
        """Offline runs force the stub labeler and the hashing embedder."""
        if not self.offline:
            return self
        return self.model_copy(update={
            "embedding": self.embedding.model_copy(update={"mode": "hashing", "cache_path": None}),
            "labeler": self.labeler.model_copy(update={"mode": "deterministic_stub"}),
            "inputs": self.inputs.model_copy(update={"extractor_endpoint": None}),
        })

    def input_paths(self) -> List[str]:
        paths = [self.inputs.reviews, self.inputs.gold, self.labeler.few_shot_path]
        paths += [f.path for f in self.inputs.features]
        return [p for p in paths if p]

    def check(self, check_paths: bool = True) -> None:
        """Cross-field checks on top of the per-field types."""
        from ..stages.cluster.sweep import Linkage, SweepConfig
        from ..stages.corpus.models import DedupScope, FeatureSource
        from ..stages.select.selection import SelectionConfig, SizePenalty, Strategy
        from ..stages.taxonomy.models import LabelerMode

        try:
            SweepConfig(start=self.clustering.start, stop=self.clustering.stop, step=self.clustering.step,
                        linkage=Linkage(self.clustering.linkage)).validate()
            SelectionConfig(strategy=Strategy(self.selection.strategy), alpha=self.selection.alpha,
                            gamma=self.selection.gamma, stability_margin=self.selection.stability_margin,
                            size_penalty=SizePenalty(self.selection.size_penalty)).validate()
            LabelerMode(self.labeler.mode)
            DedupScope(self.corpus.dedup_scope)
            FeatureSource(self.inputs.extractor_source)
            for feature_input in self.inputs.features:
                FeatureSource(feature_input.source)
        except ValueError as e:
            raise ConfigError(str(e)) from e
        if not self.clustering.start < self.clustering.stop:
            raise ConfigError("sweep start must be below sweep stop")
        if self.embedding.mode not in ("hashing", "remote", "local"):
            raise ConfigError(f"unknown embedding mode {self.embedding.mode!r}")
        if not 0.0 <= self.sigma <= 1.0:
            raise ConfigError(f"sigma must be in [0, 1], got {self.sigma}")
        if self.labeler.structural_weight != 0.0:
            raise ConfigError("structural similarity in merging is not implemented; structural_weight must be 0")
        if self.labeler.min_subtree_size < 1:
            raise ConfigError("min_subtree_size must be >= 1")
        if self.eval.beta <= 0 or any(n < 0 for n in self.eval.n_slack):
            raise ConfigError("beta must be > 0 and n_slack values >= 0")
        if self.corpus.sample_size is not None and self.corpus.sample_size < 0:
            raise ConfigError("sample_size must be >= 0")
        if not self.inputs.features and not self.inputs.extractor_endpoint:
            raise ConfigError("no feature source: give inputs.features or inputs.extractor_endpoint")
        if self.inputs.extractor_endpoint and not self.inputs.reviews:
            raise ConfigError("the extractor endpoint needs inputs.reviews")
        if check_paths:
            missing = [p for p in self.input_paths() if not Path(p).is_file()]
            if missing:
                raise ConfigError(f"input files not found: {', '.join(missing)}")


def _describe(error: ValidationError) -> str:
    return "; ".join(
        f"{'.'.join(str(part) for part in item['loc']) or 'config'}: {item['msg']}" for item in error.errors()
    )


def config_from_dict(data: Any) -> PipelineConfig:
    try:
        return PipelineConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"invalid config: {_describe(e)}") from e


def load_config(path: Optional[str] = None) -> PipelineConfig:
    if path is None:
        return PipelineConfig()
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise ConfigError(f"config file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid JSON ({e})") from e
    return config_from_dict(data)


def apply_overrides(config: PipelineConfig, overrides: Dict[str, Any]) -> PipelineConfig:
    """Set dotted-path fields (e.g. "selection.strategy"); None values are ignored."""
    data = config.model_dump()
    for dotted, value in overrides.items():
        if value is None:
            continue
        *parents, leaf = dotted.split(".")
        holder = data
        for name in parents:
            holder = holder.get(name) if isinstance(holder, dict) else None
        if not isinstance(holder, dict) or leaf not in holder:
            raise ConfigError(f"unknown config field {dotted!r}")
        holder[leaf] = value
    return config_from_dict(data)


def config_to_dict(config: PipelineConfig) -> Dict[str, Any]:
    return config.model_dump()


def file_digest(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for chunk in iter(lambda: handle.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def config_hash(config: PipelineConfig) -> str:
    """SHA-256 over the canonical config JSON plus the digest of every input file."""
    document = {
        "config": config_to_dict(config),
        "inputs": {p: file_digest(p) for p in sorted(config.input_paths()) if Path(p).is_file()},
    }
    canonical = json.dumps(document, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
