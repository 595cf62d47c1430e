"""First-link network extraction and analysis."""

__version__ = "0.1.0"
