import logging
import time
from typing import Any, Dict, List, Optional

import litellm

from ....config.settings import BACKOFF_SECONDS, get_llm_api_base, get_llm_api_key
from ....errors import LabelingError

logger = logging.getLogger(__name__)


def _content(response: Any) -> str:
    choice = response["choices"][0] if isinstance(response, dict) else response.choices[0]
    message = choice["message"] if isinstance(choice, dict) else choice.message
    content = message["content"] if isinstance(message, dict) else message.content
    return content or ""


def complete(messages: List[Dict[str, str]], model: str, temperature: float = 0.0,
             retries: int = 3, api_base: Optional[str] = None,
             backoff: float = BACKOFF_SECONDS) -> str:
    """Chat completion text, retried with exponential backoff.

    Raises:
        LabelingError: every attempt failed.
    """
    last_error: Optional[Exception] = None
    for attempt in range(retries):
        try:
            response = litellm.completion(
                model=model,
                messages=messages,
                temperature=temperature,
                api_base=api_base or get_llm_api_base() or None,
                api_key=get_llm_api_key() or None,
            )
            return _content(response)
        except Exception as e:
            last_error = e
            logger.warning(f"Chat completion attempt {attempt + 1}/{retries} failed: {e}")
            if attempt + 1 < retries:
                time.sleep(backoff * 2 ** attempt)
    raise LabelingError(f"chat completion failed after {retries} attempts: {last_error}")
