"""Divergent semantic integration scoring for scientific abstracts."""

from ._scidsi import (
    ScidsiError,
    Segmenter,
    Vocabulary,
    __version__,
    cosine_distance,
    dsi,
    dsi_single_vector,
    effect_percent,
    jarque_bera,
    levene,
    log10p1,
    ols,
    pearson,
    run_stage,
    segment,
    spearman,
    synthetic_corpus_jsonl,
    tokenize,
    train_segmenter,
)

__all__ = [
    "ScidsiError",
    "Segmenter",
    "Vocabulary",
    "__version__",
    "cosine_distance",
    "dsi",
    "dsi_single_vector",
    "effect_percent",
    "jarque_bera",
    "levene",
    "log10p1",
    "ols",
    "pearson",
    "run_stage",
    "segment",
    "spearman",
    "synthetic_corpus_jsonl",
    "tokenize",
    "train_segmenter",
]
