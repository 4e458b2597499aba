"""Sequential covering: pick a class, grow a rule for it, accept or stop, repeat."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _kernels
from .core import (
    DEFAULT,
    FEATURES,
    SPECIFIC,
    AlphabetMismatchError,
    DataError,
    Dataset,
    InductionConfig,
    Literal,
    Rule,
    RuleSet,
    RuleStats,
    validate_config,
)
from .scoring import fbeta_counts
from .silhouette import ClassScore, feature_scale, pick_best, score_classes

# rejection / stop reasons
TRAIN_COVERAGE = "train coverage"
VAL_COVERAGE = "val coverage"
VAL_ACCURACY = "val accuracy"
TRAIN_ACCURACY = "train accuracy"
NO_LITERALS = "no literals"


def candidate_thresholds(remaining: Dataset, feature: str) -> list[float]:
    """Midpoints between consecutive distinct values of ``feature``."""
    col = np.sort(remaining.X[:, FEATURES.index(feature)])
    zeros = np.zeros(col.shape[0], dtype=np.int64)
    mids, _, _ = _kernels.threshold_scan(col, zeros, zeros)
    return mids.tolist()


@dataclass(frozen=True)
class _Candidate:
    score: float
    fp: int
    feature: int
    threshold: float
    op: int  # 0 for <=, 1 for >
    tp: int

    def key(self):
        return (-self.score, self.fp, self.feature, self.threshold, self.op)


def _best_literal(X, is_target, covered, beta, n_target) -> _Candidate | None:
    """Best single literal to AND onto the current coverage mask, or None if no split exists."""
    pos_w = (covered & is_target).astype(np.int64)
    neg_w = (covered & ~is_target).astype(np.int64)
    pos_total = int(pos_w.sum())
    neg_total = int(neg_w.sum())
    best = None
    for f in range(X.shape[1]):
        order = np.argsort(X[:, f], kind="stable")
        thr, tp_le, fp_le = _kernels.threshold_scan(X[order, f], pos_w[order], neg_w[order])
        if thr.shape[0] == 0:
            continue
        tp_gt = pos_total - tp_le
        fp_gt = neg_total - fp_le
        for op, tp, fp in ((0, tp_le, fp_le), (1, tp_gt, fp_gt)):
            score = fbeta_counts(tp, fp, n_target - tp, beta)
            # lexicographic argmax: score desc, fp asc, threshold asc (arrays are threshold-sorted)
            top = score.max()
            cand = np.flatnonzero(score == top)
            k = cand[np.argmin(fp[cand])]
            c = _Candidate(float(top), int(fp[k]), f, float(thr[k]), op, int(tp[k]))
            if best is None or c.key() < best.key():
                best = c
    return best


def grow_rule(remaining: Dataset, target: str, cfg: InductionConfig) -> Rule:
    """Greedily grow a conjunction for ``target`` that maximises F-Beta on ``remaining``.

    The first literal is always the best available one; later literals are
    added only while they strictly improve the score.
    """
    X = remaining.X
    is_target = remaining.y == remaining.code(target)
    n_target = int(is_target.sum())
    covered = np.ones(len(remaining), dtype=bool)
    current = None
    literals = []
    while len(literals) < cfg.max_literals:
        cand = _best_literal(X, is_target, covered, cfg.beta, n_target)
        if cand is None:
            break
        if current is not None and not cand.score > current:
            break
        lit = Literal(FEATURES[cand.feature], "<=" if cand.op == 0 else ">", cand.threshold)
        literals.append(lit)
        covered &= lit.mask(X)
        current = cand.score
    return Rule(tuple(literals), target, SPECIFIC)


def _stats(rule: Rule, ds: Dataset | None) -> RuleStats | None:
    if ds is None:
        return None
    m = rule.mask(ds.X)
    correct = int(np.count_nonzero(m & (ds.y == ds.code(rule.predicted_class))))
    return RuleStats(int(np.count_nonzero(m)), correct)


@dataclass(frozen=True)
class Verdict:
    accepted: bool
    reason: str | None = None
    train: RuleStats | None = None
    val: RuleStats | None = None

    def __bool__(self):
        return self.accepted


def accept_rule(rule: Rule, target: str, train_remaining: Dataset, val_remaining: Dataset | None,
                cfg: InductionConfig) -> Verdict:
    """Check a grown rule against the coverage/accuracy gates.

    With ``val_remaining=None`` the accuracy gate is applied to the training
    cover instead (used for personalization, where there is no validation set).
    All bounds are inclusive.
    """
    train = _stats(rule, train_remaining)
    val = _stats(rule, val_remaining)
    if not rule.literals:
        return Verdict(False, NO_LITERALS, train, val)
    if train.covered < cfg.min_train_coverage:
        return Verdict(False, TRAIN_COVERAGE, train, val)
    if val is None:
        if train.correct / train.covered < cfg.min_val_accuracy:
            return Verdict(False, TRAIN_ACCURACY, train, val)
        return Verdict(True, None, train, val)
    if val.covered < cfg.min_val_coverage:
        return Verdict(False, VAL_COVERAGE, train, val)
    if val.covered == 0 or val.correct / val.covered < cfg.min_val_accuracy:
        return Verdict(False, VAL_ACCURACY, train, val)
    return Verdict(True, None, train, val)


def majority_class(ds: Dataset) -> str | None:
    if len(ds) == 0:
        return None
    # argmax returns the first maximum, i.e. the earliest class in alphabet order
    return ds.alphabet[int(np.argmax(ds.counts))]


def default_rule(remaining: Dataset, fallback: Dataset | str, val_remaining: Dataset | None = None) -> Rule:
    """Majority-vote default rule; ``fallback`` (dataset or class) is used when nothing remains."""
    label = majority_class(remaining)
    if label is None:
        label = fallback if isinstance(fallback, str) else majority_class(fallback)
    if label is None:
        raise DataError("cannot build a default rule from empty data")
    rule = Rule((), label, DEFAULT)
    return Rule((), label, DEFAULT, _stats(rule, remaining), _stats(rule, val_remaining))


@dataclass
class IterationRecord:
    iteration: int
    train_remaining: int
    val_remaining: int | None
    class_scores: list[ClassScore] = field(default_factory=list)
    selected_class: str | None = None
    rule: str | None = None
    accepted: bool = False
    reason: str | None = None

    def to_dict(self):
        return asdict(self)


@dataclass
class InductionTrace:
    iterations: list[IterationRecord] = field(default_factory=list)
    stop_reason: str | None = None
    # sample ids removed by each accepted rule, in rule order
    removed: list[list[int]] = field(default_factory=list)

    def to_dict(self):
        return {
            "stop_reason": self.stop_reason,
            "iterations": [it.to_dict() for it in self.iterations],
            "removed": self.removed,
        }


def covering_loop(train: Dataset, val: Dataset | None, cfg: InductionConfig, kind: str = SPECIFIC,
                  scale=None) -> tuple[list[Rule], Dataset, Dataset | None, InductionTrace]:
    """Run the covering loop; returns (rules, train_left, val_left, trace) without a default rule."""
    rules: list[Rule] = []
    trace = InductionTrace()
    train_left, val_left = train, val
    while True:
        rec = IterationRecord(len(trace.iterations), len(train_left), None if val_left is None else len(val_left))
        if len(rules) >= cfg.max_rules:
            trace.stop_reason = "max rules"
        elif len(train_left) < cfg.min_train_remaining:
            trace.stop_reason = "train remaining"
        elif val_left is not None and len(val_left) < cfg.min_val_remaining:
            trace.stop_reason = "val remaining"
        elif len(train_left.present_classes()) < 2:
            trace.stop_reason = "single class"
        if trace.stop_reason:
            break
        scores = score_classes(train_left, cfg, scale)
        if not scores:
            trace.stop_reason = "single class"
            break
        best = pick_best(scores)
        rec.class_scores = scores
        rec.selected_class = best.label
        rule = grow_rule(train_left, best.label, cfg)
        verdict = accept_rule(rule, best.label, train_left, val_left, cfg)
        rec.rule = str(rule)
        rec.accepted = verdict.accepted
        rec.reason = verdict.reason
        trace.iterations.append(rec)
        if not verdict:
            trace.stop_reason = f"rejected: {verdict.reason}"
            break
        rules.append(Rule(rule.literals, rule.predicted_class, kind, verdict.train, verdict.val))
        hit = rule.mask(train_left.X)
        trace.removed.append(train_left.sample_ids[hit].tolist())
        train_left = train_left.subset(np.flatnonzero(~hit))
        if val_left is not None:
            val_left = val_left.subset(np.flatnonzero(~rule.mask(val_left.X)))
    return rules, train_left, val_left, trace


def induce_ruleset(train: Dataset, val: Dataset, cfg: InductionConfig | None = None) -> tuple[RuleSet, InductionTrace]:
    """Learn an ordered rule list from ``train``, gating each rule on ``val``."""
    cfg = validate_config(cfg or InductionConfig())
    if len(train) == 0:
        raise DataError("training set is empty")
    if len(val) == 0:
        raise DataError("validation set is empty")
    if train.alphabet != val.alphabet:
        raise AlphabetMismatchError(f"train alphabet {train.alphabet} != val alphabet {val.alphabet}")
    scale = feature_scale(train) if cfg.normalize else None
    rules, train_left, val_left, trace = covering_loop(train, val, cfg, SPECIFIC, scale)
    rules.append(default_rule(train_left, train, val_left))
    return RuleSet(tuple(rules), cfg, train.alphabet), trace


def personal_config(cfg: InductionConfig, n_residual: int) -> InductionConfig:
    """Training-only gates for inducing rules on a (small) calibration residual."""
    return cfg.replace(
        max_rules=cfg.max_personal_rules,
        min_train_coverage=max(cfg.personal_min_coverage_floor, math.ceil(cfg.personal_min_coverage_frac * n_residual)),
        min_train_remaining=cfg.personal_min_train_remaining,
    )
