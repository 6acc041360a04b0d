"""Issue title suggestion toolkit.

Corpus ingestion and heuristic curation, from-scratch ROUGE metrics,
pluggable title generators behind a REST service, and a blinded
human-preference study harness.
"""

__version__ = "0.1.0"
