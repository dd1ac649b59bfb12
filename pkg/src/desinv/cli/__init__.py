"""Command-line surface: ingestion, reports, experiments, figures."""

from .main import main

__all__ = ["main"]
