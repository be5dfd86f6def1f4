"""Compound-noun trend mining over time-stamped document corpora."""

__version__ = "0.1.0"
