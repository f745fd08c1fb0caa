"""Exact elimination theory for Newton polytopes."""

__version__ = "0.1.0"
