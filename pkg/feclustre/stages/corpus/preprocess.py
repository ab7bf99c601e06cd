"""Review cleaning, feature normalization and tokenization."""
import regex

from ...errors import RejectedFeature, SkippableReview

# Extended pictographics plus the code points that glue or modify them
# (variation selectors, ZWJ, keycap, skin tones, regional indicators).
EMOJI_RE = regex.compile(
    r"[\p{Extended_Pictographic}\uFE0E\uFE0F\u200D\u20E3\U0001F3FB-\U0001F3FF\U0001F1E6-\U0001F1FF]"
)
URL_RE = regex.compile(r"(?:https?://|www\.)\S+", regex.IGNORECASE)
WS_RE = regex.compile(r"\s+")
EDGE_PUNCT_RE = regex.compile(r"^[\p{P}\p{S}\s]+|[\p{P}\p{S}\s]+$")
# Every punctuation mark except intra-word hyphens and apostrophes
BOUNDARY_RE = regex.compile(r"((?<![\p{L}\p{N}])[-']|[-'](?![\p{L}\p{N}])|(?![-'])\p{P})")


def collapse_whitespace(text: str) -> str:
    return WS_RE.sub(" ", text).strip()


def preprocess_review(raw: str, review_id: str = None) -> str:
    """Strip emojis and URLs, collapse whitespace, keep punctuation.

    Raises:
        SkippableReview: nothing is left after cleaning.
    """
    text = EMOJI_RE.sub(" ", raw)
    text = URL_RE.sub(" ", text)
    text = collapse_whitespace(text)
    if not text:
        raise SkippableReview(review_id)
    return text


def normalize_feature(raw: str) -> str:
    """Lowercase, collapse whitespace and strip edge punctuation and symbols.

    Raises:
        RejectedFeature: the input was punctuation, symbols or whitespace only.
    """
    surface = collapse_whitespace(raw.lower())
    surface = EDGE_PUNCT_RE.sub("", surface)
    if not surface:
        raise RejectedFeature(raw)
    return surface


def tokenize(surface: str) -> list:
    """Split on whitespace after isolating punctuation; hyphenated words stay whole."""
    return BOUNDARY_RE.sub(r" \1 ", surface).split()
