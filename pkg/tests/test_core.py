import math

import numpy as np
import pytest

from mira_rules.core import (
    FEATURES,
    ConfigError,
    DataError,
    Dataset,
    FeatureVector,
    GestureRecording,
    InductionConfig,
    Literal,
    MiraError,
    Rule,
    RuleSet,
    RuleStats,
    validate_config,
)


def test_default_config_accepted():
    cfg = InductionConfig()
    assert validate_config(cfg) is cfg
    assert (cfg.max_rules, cfg.max_literals) == (15, 2)
    assert (cfg.min_train_coverage, cfg.min_val_coverage, cfg.min_val_accuracy) == (8, 5, 0.70)
    assert (cfg.min_train_remaining, cfg.min_val_remaining) == (6, 2)
    assert (cfg.lambda1, cfg.lambda2, cfg.lambda3, cfg.beta) == (0.5, 10.0, 0.7, 0.3)
    assert cfg.max_personal_rules == 4


@pytest.mark.parametrize(
    "change, message",
    [
        ({"lambda1": 1.5}, "lambda1 out of [0,1]"),
        ({"lambda3": -0.1}, "lambda3 out of [0,1]"),
        ({"min_val_accuracy": -0.1}, "min_val_accuracy"),
        ({"lambda2": -1.0}, "lambda2"),
        ({"beta": -0.3}, "beta"),
        ({"max_rules": 0}, "max_rules"),
        ({"min_train_coverage": 2.5}, "min_train_coverage"),
        ({"silhouette_mode": "mean"}, "silhouette_mode"),
    ],
)
def test_config_bounds(change, message):
    with pytest.raises(ConfigError, match=message.replace("[", r"\[").replace("]", r"\]")):
        validate_config(InductionConfig().replace(**change))


def test_feature_vector_order_and_finiteness():
    fv = FeatureVector(1, 2, 3, 4, 5)
    assert fv.to_array().tolist() == [1, 2, 3, 4, 5]
    assert [fv[name] for name in FEATURES] == [fv[i] for i in range(5)]
    with pytest.raises(DataError):
        FeatureVector(1, float("nan"), 3, 4, 5)
    with pytest.raises(DataError):
        FeatureVector.from_array([1, 2, 3, 4, math.inf])


def test_recording_window_bounds():
    frames = np.zeros((20, 5))
    assert GestureRecording(frames, 5, 15).window_length == 10
    for start, end in [(-1, 5), (5, 5), (10, 21)]:
        with pytest.raises(DataError):
            GestureRecording(frames, start, end)


def test_dataset_counts_and_immutability():
    ds = Dataset(np.zeros((4, 5)), [0, 1, 1, 2], ("A", "B", "C"))
    assert ds.class_counts() == {"A": 1, "B": 2, "C": 1}
    assert ds.counts.sum() == len(ds)
    with pytest.raises(ValueError):
        ds.X[0, 0] = 1.0
    with pytest.raises(DataError):
        Dataset(np.zeros((2, 5)), [0, 3], ("A", "B"))
    with pytest.raises(DataError):
        Dataset(np.zeros((2, 5)), [0, 1], ("A", "B"), sample_ids=[7, 7])
    with pytest.raises(DataError):
        Dataset(np.zeros((0, 5)), [], ())


def test_literal_semantics():
    assert Literal("azimuth", "<=", -0.3).holds(-0.3)
    assert not Literal("azimuth", ">", -0.3).holds(-0.3)
    with pytest.raises(MiraError):
        Literal("speed", "<=", 1.0)
    with pytest.raises(MiraError):
        Literal("range", "<", 1.0)
    with pytest.raises(MiraError):
        Literal("range", "<=", float("nan"))


def test_rule_stats_and_default_shape():
    with pytest.raises(MiraError):
        RuleStats(3, 4)
    with pytest.raises(MiraError):
        Rule((Literal("range", "<=", 1.0),), "A", "default")


def test_ruleset_invariants():
    lit = Literal("range", "<=", 1.0)
    ok = RuleSet((Rule((lit,), "A"), Rule((), "B", "default")), InductionConfig(), ("A", "B"))
    assert ok.default.predicted_class == "B"
    with pytest.raises(MiraError, match="end with a default"):
        RuleSet((Rule((lit,), "A"),), InductionConfig(), ("A", "B"))
    with pytest.raises(MiraError, match="exactly one"):
        RuleSet((Rule((), "A", "default"), Rule((), "B", "default")), InductionConfig(), ("A", "B"))
    with pytest.raises(MiraError, match="max_literals"):
        RuleSet((Rule((lit, lit, lit), "A"), Rule((), "B", "default")), InductionConfig(), ("A", "B"))
    with pytest.raises(MiraError, match="max_rules"):
        RuleSet(tuple(Rule((lit,), "A") for _ in range(3)) + (Rule((), "B", "default"),),
                InductionConfig(max_rules=2), ("A", "B"))
    with pytest.raises(MiraError, match="no literals"):
        RuleSet((Rule((), "A"), Rule((), "B", "default")), InductionConfig(), ("A", "B"))
