"""Extraction correctness and clustering quality evaluation."""
