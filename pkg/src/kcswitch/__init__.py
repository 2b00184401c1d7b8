"""Korean-English code-switching analysis for chart-annotated song lyrics."""

__version__ = "0.1.0"
