import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mira_rules.core import AlphabetMismatchError, DEFAULT_GESTURES, FeatureVector, InductionConfig, Rule, RuleSet
from mira_rules.inference import evaluate, explain, fired_rules, predict
from oracles import make_ds
from strategies import rule_lists, rule_sets, vectors


def fv(azimuth):
    return FeatureVector(0.0, 0.0, azimuth, 0.0, 0.0)


def test_default_only_is_total():
    rs = RuleSet((Rule((), "Push", "default"),), InductionConfig(), DEFAULT_GESTURES)
    for az in (-10.0, 0.0, 10.0):
        p = predict(rs, fv(az))
        assert p.label == "Push" and p.fired_rule_index == 0 and p.is_default


def test_first_match(swipe_rules):
    assert predict(swipe_rules, fv(-0.5)).label == "SwipeLeft"
    assert predict(swipe_rules, fv(-0.5)).fired_rule_index == 0
    assert predict(swipe_rules, fv(0.5)).fired_rule_index == 1
    assert predict(swipe_rules, fv(0.0)).label == "SwipeUp"


def test_boundary_is_inclusive(swipe_rules):
    assert predict(swipe_rules, fv(-0.3)).fired_rule_index == 0
    assert predict(swipe_rules, fv(0.3)).fired_rule_index == 2


def test_explain_default_only():
    rs = RuleSet((Rule((), "Push", "default"),), InductionConfig(), DEFAULT_GESTURES)
    trace = explain(rs, fv(1.0))
    assert len(trace) == 1 and trace[0].fired and trace[0].literals == ()


def test_explain_failed_literal():
    from mira_rules.core import Literal
    rs = RuleSet(
        (Rule((Literal("range", "<=", 1.0), Literal("azimuth", ">", 0.0)), "SwipeLeft"),
         Rule((), "Push", "default")),
        InductionConfig(), DEFAULT_GESTURES,
    )
    trace = explain(rs, FeatureVector(0.5, 0, -1.0, 0, 0))
    assert [c.holds for c in trace[0].literals] == [True, False]
    assert not trace[0].fired and trace[1].fired and trace[1].rule_index == 1


@settings(max_examples=300)
@given(rule_sets(), vectors)
def test_explain_agrees_with_predict(rs, x):
    trace = explain(rs, x)
    p = predict(rs, x)
    assert trace[-1].rule_index == p.fired_rule_index
    assert trace[-1].fired and not any(t.fired for t in trace[:-1])
    assert [t.rule_index for t in trace] == list(range(len(trace)))


@settings(max_examples=200)
@given(rule_sets(), rule_lists(4), st.lists(vectors, min_size=1, max_size=20))
def test_prefix_stability(rs, extra, xs):
    longer = RuleSet(rs.body + tuple(extra) + (rs.default,), rs.config, rs.alphabet)
    for x in xs:
        p = predict(rs, x)
        if not p.is_default:
            assert predict(longer, x) == p


@settings(max_examples=100)
@given(rule_sets(), st.lists(vectors, min_size=1, max_size=30))
def test_batch_matches_scalar(rs, xs):
    X = np.array([x.to_array() for x in xs])
    fired = fired_rules(rs, X)
    assert fired.tolist() == [predict(rs, x).fired_rule_index for x in xs]


def test_evaluate_majority_baseline():
    ds = make_ds([[0.0]] * 10, ["A"] * 7 + ["B"] * 3)
    rs = RuleSet((Rule((), "A", "default"),), InductionConfig(), ("A", "B"))
    report = evaluate(rs, ds)
    assert report.accuracy == pytest.approx(0.7)
    assert report.confusion.tolist() == [[7, 0], [3, 0]]
    assert report.precision == {"A": 0.7, "B": 0.0}
    assert report.recall == {"A": 1.0, "B": 0.0}


def test_evaluate_partition(separable_splits):
    from mira_rules.induction import induce_ruleset
    train, val, test = separable_splits
    rs, _ = induce_ruleset(train, val)
    report = evaluate(rs, test)
    assert sum(r["covered"] for r in report.per_rule) == len(test)
    assert report.confusion.sum() == len(test)
    assert report.accuracy == pytest.approx(np.trace(report.confusion) / len(test))


def test_evaluate_perfect_split():
    from mira_rules.core import Literal
    ds = make_ds([[0.0], [1.0], [5.0], [6.0]], ["A", "A", "B", "B"])
    rs = RuleSet((Rule((Literal("range", "<=", 3.0),), "A"), Rule((), "B", "default")), InductionConfig(), ("A", "B"))
    report = evaluate(rs, ds)
    assert report.accuracy == 1.0
    assert report.confusion[0, 1] == report.confusion[1, 0] == 0


def test_evaluate_alphabet_mismatch():
    ds = make_ds([[0.0]], ["A"], alphabet=("A", "C"))
    rs = RuleSet((Rule((), "A", "default"),), InductionConfig(), ("A", "B"))
    with pytest.raises(AlphabetMismatchError):
        evaluate(rs, ds)
