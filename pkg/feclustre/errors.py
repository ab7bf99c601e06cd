"""Exception hierarchy shared by every pipeline stage."""
from typing import Iterable, Optional


class FeClustError(Exception):
    """Base class for all pipeline errors."""


class ConfigError(FeClustError):
    """Invalid configuration or unsupported option."""


class SkippableReview(FeClustError):
    """A review that is empty after cleaning; reported, never fatal."""

    def __init__(self, review_id: Optional[str] = None, message: str = "review is empty after cleaning"):
        super().__init__(message)
        self.review_id = review_id


class RejectedFeature(FeClustError):
    """A raw feature that normalizes to nothing."""

    def __init__(self, raw: str):
        super().__init__(f"feature {raw!r} is empty after normalization")
        self.raw = raw


class ExtractorError(FeClustError):
    """The external feature extractor could not be used."""


class EmbeddingError(FeClustError):
    def __init__(self, message: str, failed: Optional[Iterable[str]] = None):
        super().__init__(message)
        self.failed = list(failed or [])


class AffinityTooLarge(EmbeddingError):
    """Dense affinity would exceed the configured memory bound."""


class ClusteringError(FeClustError):
    """Invalid input to linkage or cutting."""


class UndefinedMetric(FeClustError):
    """A quality metric is undefined for the given cluster count."""


class SweepError(FeClustError):
    """No valid clustering candidate came out of the threshold sweep."""


class SelectionError(FeClustError):
    """No candidate could be selected."""


class LabelingError(FeClustError):
    """The remote labeler failed after all retries."""


class StageError(FeClustError):
    """A pipeline stage aborted; carries the stage name."""

    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage
