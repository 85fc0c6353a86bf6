"""Decoder contracts, the counting baseline, training and parsing."""

from .bundle import (
    BundleError, analyze_encodings,
    BundleDecoder, CorruptBundle, IterationModel, ModelBundle, VersionMismatch,
    gold_parse, load_bundle, parse, save_bundle, train,
)
from .classifier import BackoffClassifier
from .decoder import FAMILIES, GoldDecoder, ScriptMismatch, decode, make_training_examples
from .features import Analysis, State, align_companion, read_companion

__all__ = [
    "Analysis", "BackoffClassifier", "BundleError", "analyze_encodings", "BundleDecoder", "CorruptBundle", "FAMILIES", "GoldDecoder",
    "IterationModel", "ModelBundle", "ScriptMismatch", "State", "VersionMismatch", "align_companion",
    "decode", "gold_parse", "load_bundle", "make_training_examples", "parse", "read_companion", "save_bundle", "train",
]
