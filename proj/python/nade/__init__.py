"""Document NADE topic models (DocNADE and iDocNADE) with a C++ core."""

from ._nade import (
    Checkpoint,
    CompatibilityError,
    Corpus,
    Error,
    NumericalError,
    Split,
    classify,
    load_checkpoint,
    make_corpus,
    neighbors,
    perplexity,
    read_corpus,
    retrieval_precision,
    synthetic_corpus,
    topics,
    train,
)

__all__ = [
    "Checkpoint",
    "CompatibilityError",
    "Corpus",
    "Error",
    "NumericalError",
    "Split",
    "classify",
    "load_checkpoint",
    "make_corpus",
    "neighbors",
    "perplexity",
    "read_corpus",
    "retrieval_precision",
    "synthetic_corpus",
    "topics",
    "train",
]
