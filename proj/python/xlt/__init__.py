"""Cross-lingual model transfer via representation projection.

Thin wrapper over the C++ core: corpus generation, vocabulary building,
training (joint / two-stage / labeled-only), evaluation, score
interpolation, and cross-lingual nearest neighbors.
"""

from xlt._core import (
    ConfigError,
    DataError,
    DimensionError,
    NumericError,
    __version__,
    binarize_rating,
    build_vocab,
    evaluate,
    f1_from_pr,
    fisher_exact,
    gen_synth,
    interpolate,
    neighbors,
    tokenize,
    train,
)

__all__ = [
    "ConfigError",
    "DataError",
    "DimensionError",
    "NumericError",
    "__version__",
    "binarize_rating",
    "build_vocab",
    "evaluate",
    "f1_from_pr",
    "fisher_exact",
    "gen_synth",
    "interpolate",
    "neighbors",
    "tokenize",
    "train",
]
