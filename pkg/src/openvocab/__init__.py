"""Open-vocabulary spoken-query retrieval: BM25 search plus syllable-level
completion of out-of-vocabulary fragments from first-stage documents."""

from .kernels import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
