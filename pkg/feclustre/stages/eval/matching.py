"""n-slack feature matching and greedy per-review alignment."""
from dataclasses import dataclass
from typing import List, Sequence, Tuple, Union

from ...config.settings import DEFAULT_BETA
from ...errors import ConfigError
from ..corpus.models import Feature
from ..corpus.preprocess import tokenize

FeatureLike = Union[Feature, str, Sequence[str]]


@dataclass(frozen=True)
class MatchConfig:
    n_slack: int = 0
    beta: float = DEFAULT_BETA

    def __post_init__(self):
        if self.n_slack < 0:
            raise ConfigError(f"n_slack must be >= 0, got {self.n_slack}")
        if self.beta <= 0:
            raise ConfigError(f"beta must be > 0, got {self.beta}")


def _tokens(feature: FeatureLike) -> Tuple[str, ...]:
    if isinstance(feature, Feature):
        tokens = feature.tokens
    elif isinstance(feature, str):
        tokens = tokenize(feature)
    else:
        tokens = feature
    return tuple(t.lower() for t in tokens)


def _contains(outer: Tuple[str, ...], inner: Tuple[str, ...]) -> bool:
    width = len(inner)
    return any(outer[i:i + width] == inner for i in range(len(outer) - width + 1))


def features_match(p: FeatureLike, g: FeatureLike, n_slack: int) -> bool:
    """One token sequence contains the other contiguously and lengths differ by <= n_slack."""
    a, b = _tokens(p), _tokens(g)
    if abs(len(a) - len(b)) > n_slack:
        return False
    shorter, longer = (a, b) if len(a) <= len(b) else (b, a)
    return _contains(longer, shorter)


def align_review(predicted: Sequence[FeatureLike], gold: Sequence[FeatureLike],
                 config: MatchConfig) -> List[Tuple[int, int]]:
    """Greedy one-to-one alignment as (predicted index, gold index) pairs.

    Each prediction takes the first gold feature it matches that is still free.
    """
    gold_tokens = [_tokens(g) for g in gold]
    consumed = [False] * len(gold)
    pairs = []
    for i, p in enumerate(predicted):
        tokens = _tokens(p)
        for j, g in enumerate(gold_tokens):
            if not consumed[j] and features_match(tokens, g, config.n_slack):
                consumed[j] = True
                pairs.append((i, j))
                break
    return pairs
