"""News monitoring toolkit: event clustering, deduplication, propaganda scoring."""

__version__ = "0.1.0"
