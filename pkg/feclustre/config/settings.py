import os

from dotenv import load_dotenv

load_dotenv()

# Threshold sweep over cophenetic heights (cosine dissimilarity units)
SWEEP_START = 0.10
SWEEP_STOP = 0.90
SWEEP_STEP = 0.05

# Composite score weights: silhouette, inverted Davies-Bouldin, cluster count
COMPOSITE_WEIGHTS = (0.5, 0.3, 0.2)

# Dense affinity matrix bound
MAX_AFFINITY_SIZE = 20_000

# Embedding defaults
EMBED_BATCH_SIZE = 64
EMBED_RETRIES = 3
EMBED_MAX_WORKERS = 4
HASHING_DIM = 256
DEFAULT_EMBED_MODEL = os.getenv("FECLUST_EMBED_MODEL", "text-embedding-3-small")
DEFAULT_LOCAL_MODEL = "all-MiniLM-L6-v2"

# Selection defaults
DEFAULT_STRATEGY = "balanced"
DEFAULT_ALPHA = 0.25
DEFAULT_GAMMA = 0.25
DEFAULT_STABILITY_MARGIN = 0.05

# Taxonomy defaults
DEFAULT_SIGMA = 0.75
MIN_SUBTREE_SIZE = 4
MAX_LABEL_TOKENS = 6
LABEL_TEMPERATURE = 0.0
LABEL_RETRIES = 3
LABEL_MAX_WORKERS = 4
DEFAULT_LLM_MODEL = os.getenv("FECLUST_LLM_MODEL", "gpt-4o-mini")

# Evaluation defaults
DEFAULT_BETA = 2.385
DEFAULT_N_SLACK = (0, 1, 2)

# Extractor client defaults
EXTRACTOR_BATCH_SIZE = 32
EXTRACTOR_RETRIES = 3
EXTRACTOR_TIMEOUT = 30.0

BACKOFF_SECONDS = 0.5

LOG_LEVEL = os.getenv("FECLUST_LOG_LEVEL", "INFO")


def get_llm_api_key() -> str:
    """API key for the remote labeler, read at call time."""
    return os.getenv("FECLUST_LLM_API_KEY", "")


def get_llm_api_base() -> str:
    return os.getenv("FECLUST_LLM_API_BASE", "")


def get_embed_api_base() -> str:
    return os.getenv("FECLUST_EMBED_API_BASE", "")
