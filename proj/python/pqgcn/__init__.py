"""Multi-view graph-convolutional question classification."""

from ._pqgcn import (
    ConfigError,
    clean_text,
    cosine,
    evaluate,
    extract_phrases,
    gradcheck,
    load_corpus,
    macro_prf,
    match_entities,
    ppmi_edges,
    predict_to_file,
    prepare,
    tag_tokens,
    train,
)

__all__ = [
    "ConfigError",
    "clean_text",
    "cosine",
    "evaluate",
    "extract_phrases",
    "gradcheck",
    "load_corpus",
    "macro_prf",
    "match_entities",
    "ppmi_edges",
    "predict_to_file",
    "prepare",
    "tag_tokens",
    "train",
]
