import logging
from typing import Any, List, Optional, Sequence

import litellm

from ....config.settings import get_embed_api_base
from ....errors import EmbeddingError

logger = logging.getLogger(__name__)


def _field(item: Any, name: str):
    return item[name] if isinstance(item, dict) else getattr(item, name)


def request_embeddings(texts: Sequence[str], model: str,
                       api_base: Optional[str] = None,
                       api_key: Optional[str] = None) -> List[List[float]]:
    """One embeddings request; rows come back re-ordered by their `index`.

    Wire protocol: {"model", "input": [...]} -> {"data": [{"index", "embedding"}]}.
    """
    response = litellm.embedding(
        model=model,
        input=list(texts),
        api_base=api_base or get_embed_api_base() or None,
        api_key=api_key or None,
    )
    data = _field(response, "data")
    if len(data) != len(texts):
        raise EmbeddingError(f"expected {len(texts)} embeddings, got {len(data)}")
    rows = sorted(data, key=lambda item: _field(item, "index"))
    return [list(_field(item, "embedding")) for item in rows]
