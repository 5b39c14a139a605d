"""Joint localization and classification of similar binary glyphs."""

from ._simglyph import (  # noqa: F401
    AdaBoostEnsemble,
    Codebook,
    PairSpec,
    SimglyphError,
    SvmModel,
    WindowGrid,
    adaboost_classify,
    adaboost_train,
    build_codebook,
    descriptors,
    extract_seeds,
    gate_confidence,
    generate_pair,
    mine_pairs,
    normalize,
    predict,
    sample_features,
    sobel,
    train,
    train_gate,
)

__all__ = [
    "AdaBoostEnsemble",
    "Codebook",
    "PairSpec",
    "SimglyphError",
    "SvmModel",
    "WindowGrid",
    "adaboost_classify",
    "adaboost_train",
    "build_codebook",
    "descriptors",
    "extract_seeds",
    "gate_confidence",
    "generate_pair",
    "mine_pairs",
    "normalize",
    "predict",
    "sample_features",
    "sobel",
    "train",
    "train_gate",
]
