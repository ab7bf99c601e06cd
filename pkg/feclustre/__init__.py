"""Feature clustering for app reviews: extraction post-processing, auto-tuned
hierarchical clustering, LLM tagging and taxonomy merging."""

__version__ = "0.1.0"
