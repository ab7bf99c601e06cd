import logging
import time
from typing import Any, Dict, List, Optional, Sequence, Tuple

import httpx

from ....config.settings import BACKOFF_SECONDS, EXTRACTOR_BATCH_SIZE, EXTRACTOR_RETRIES, EXTRACTOR_TIMEOUT
from ....errors import ExtractorError
from ..features import build_feature_set, features_from_raw
from ..models import DedupScope, FeatureSet, FeatureSource, Review

logger = logging.getLogger(__name__)


class ExtractorClient:
    """Client for a feature-extraction microservice.

    Wire protocol: POST {"reviews": [{"id", "text"}]} -> {"features": [{"review_id", "text"}]}.
    """

    def __init__(self, endpoint: str, source: FeatureSource,
                 batch_size: int = EXTRACTOR_BATCH_SIZE,
                 retries: int = EXTRACTOR_RETRIES,
                 backoff: float = BACKOFF_SECONDS,
                 timeout: float = EXTRACTOR_TIMEOUT,
                 client: Optional[httpx.Client] = None):
        self.endpoint = endpoint
        self.source = FeatureSource(source)
        self.batch_size = batch_size
        self.retries = retries
        self.backoff = backoff
        self._owns_client = client is None
        self.client = client or httpx.Client(timeout=timeout)

    def close(self) -> None:
        if self._owns_client:
            self.client.close()

    def __enter__(self) -> "ExtractorClient":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def _post(self, payload: Dict[str, Any]) -> Any:
        last_error = None
        for attempt in range(self.retries + 1):
            try:
                response = self.client.post(self.endpoint, json=payload)
                if response.status_code < 500:
                    response.raise_for_status()
                    try:
                        return response.json()
                    except ValueError:
                        return None
                last_error = ExtractorError(f"HTTP {response.status_code}")
            except httpx.HTTPStatusError as e:
                raise ExtractorError(f"HTTP {e.response.status_code} from {self.endpoint}") from e
            except httpx.TransportError as e:
                last_error = e
            if attempt < self.retries:
                time.sleep(self.backoff * 2 ** attempt)
        raise ExtractorError(f"extractor at {self.endpoint} failed after {self.retries} retries: {last_error}")

    def fetch(self, reviews: Sequence[Review]) -> Tuple[List[Tuple[str, str]], List[dict]]:
        """Return (review_id, raw feature) pairs and per-review error records."""
        pairs, errors = [], []
        for start in range(0, len(reviews), self.batch_size):
            batch = reviews[start:start + self.batch_size]
            payload = {"reviews": [{"id": r.review_id, "text": r.body} for r in batch]}
            try:
                data = self._post(payload)
            except ExtractorError as e:
                logger.error(f"Extractor batch at offset {start} failed: {e}")
                errors.extend({"review_id": r.review_id, "reason": str(e)} for r in batch)
                continue
            parsed = _parse_response(data)
            if parsed is None:
                logger.warning(f"Skipping malformed extractor response for batch at offset {start}")
                errors.append({"batch_offset": start, "reason": "malformed response"})
                continue
            pairs.extend(parsed)
        return pairs, errors


def _parse_response(data: Any) -> Optional[List[Tuple[str, str]]]:
    if not isinstance(data, dict) or not isinstance(data.get("features"), list):
        return None
    pairs = []
    for item in data["features"]:
        if not isinstance(item, dict) or not isinstance(item.get("text"), str) or "review_id" not in item:
            return None
        pairs.append((str(item["review_id"]), item["text"]))
    return pairs


def fetch_external_features(endpoint: str, reviews: Sequence[Review],
                            source: FeatureSource = FeatureSource.LLM,
                            scope: DedupScope = DedupScope.CORPUS,
                            client: Optional[ExtractorClient] = None) -> Tuple[FeatureSet, List[dict]]:
    """Extract features remotely; returns a possibly partial set and an error report.

    A client created here is closed before returning; a passed-in client is left open.
    """
    if client is None:
        with ExtractorClient(endpoint, source) as owned:
            pairs, errors = owned.fetch(reviews)
        source = owned.source
    else:
        pairs, errors = client.fetch(reviews)
        source = client.source
    features, rejected = features_from_raw(pairs, source)
    logger.info(f"Fetched {len(features)} features from {endpoint} ({len(errors)} errors)")
    return build_feature_set(features, scope), errors + rejected
