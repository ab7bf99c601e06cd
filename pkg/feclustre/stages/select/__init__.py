"""Candidate selection strategies."""
