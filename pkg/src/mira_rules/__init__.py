"""Interpretable multi-class rule induction for radar gesture features."""

from .core import (
    DEFAULT_GESTURES,
    FEATURES,
    Dataset,
    FeatureVector,
    GestureRecording,
    InductionConfig,
    LabeledSample,
    Literal,
    MiraError,
    Rule,
    RuleSet,
    RuleStats,
    validate_config,
)
from .induction import induce_ruleset
from .inference import evaluate, explain, predict
from .personalization import personalize

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_GESTURES", "FEATURES", "Dataset", "FeatureVector", "GestureRecording",
    "InductionConfig", "LabeledSample", "Literal", "MiraError", "Rule", "RuleSet",
    "RuleStats", "validate_config", "induce_ruleset", "evaluate", "explain", "predict",
    "personalize",
]
