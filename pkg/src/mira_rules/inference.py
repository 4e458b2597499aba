"""Decision-list prediction, explanation traces and evaluation reports."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import AlphabetMismatchError, Dataset, FeatureVector, RuleSet


@dataclass(frozen=True)
class Prediction:
    label: str
    fired_rule_index: int
    is_default: bool


@dataclass(frozen=True)
class LiteralCheck:
    feature: str
    value: float
    op: str
    threshold: float
    holds: bool


@dataclass(frozen=True)
class RuleCheck:
    rule_index: int
    literals: tuple[LiteralCheck, ...]
    fired: bool


def predict(rs: RuleSet, x: FeatureVector) -> Prediction:
    for i, rule in enumerate(rs.rules):
        if rule.matches(x):
            return Prediction(rule.predicted_class, i, rule.is_default)
    raise AssertionError("unreachable: the default rule matches every input")


def fired_rules(rs: RuleSet, X: np.ndarray) -> np.ndarray:
    """Index of the first matching rule for every row of ``X``."""
    fired = np.full(X.shape[0], -1, dtype=np.int64)
    for i, rule in enumerate(rs.rules):
        open_ = fired < 0
        if not open_.any():
            break
        hit = open_.copy()
        hit[open_] = rule.mask(X[open_])
        fired[hit] = i
    return fired


def predict_batch(rs: RuleSet, X: np.ndarray) -> tuple[list[str], np.ndarray]:
    fired = fired_rules(rs, np.asarray(X, dtype=np.float64).reshape(-1, 5))
    return [rs.rules[i].predicted_class for i in fired], fired


def explain(rs: RuleSet, x: FeatureVector) -> list[RuleCheck]:
    """Literal truth table for each rule up to and including the one that fires."""
    out = []
    for i, rule in enumerate(rs.rules):
        checks = tuple(
            LiteralCheck(lit.feature, x[lit.feature], lit.op, lit.threshold, lit.holds(x[lit.feature]))
            for lit in rule.literals
        )
        fired = all(c.holds for c in checks)
        out.append(RuleCheck(i, checks, fired))
        if fired:
            break
    return out


def format_explanation(trace: list[RuleCheck]) -> str:
    lines = []
    for rc in trace:
        if not rc.literals:
            lines.append(f"  rule {rc.rule_index}: (default) fired")
            continue
        parts = [
            f"{c.feature}={c.value!r} {c.op} {c.threshold!r}:{'T' if c.holds else 'F'}" for c in rc.literals
        ]
        lines.append(f"  rule {rc.rule_index}: " + ", ".join(parts) + (" fired" if rc.fired else ""))
    return "\n".join(lines)


@dataclass(frozen=True)
class EvalReport:
    alphabet: tuple[str, ...]
    accuracy: float
    confusion: np.ndarray  # rows: true class, columns: predicted class
    per_rule: list[dict]
    precision: dict[str, float]
    recall: dict[str, float]

    @property
    def size(self) -> int:
        return int(self.confusion.sum())

    def to_dict(self) -> dict:
        return {
            "alphabet": list(self.alphabet),
            "size": self.size,
            "accuracy": self.accuracy,
            "confusion": self.confusion.tolist(),
            "per_rule": self.per_rule,
            "precision": self.precision,
            "recall": self.recall,
        }

    def format(self) -> str:
        width = max(len(c) for c in self.alphabet)
        lines = [f"samples: {self.size}", f"accuracy: {self.accuracy:.3f}", "confusion (rows=true, cols=pred):"]
        lines.append(" " * (width + 2) + " ".join(f"{c:>{width}}" for c in self.alphabet))
        for c, row in zip(self.alphabet, self.confusion):
            lines.append(f"{c:>{width}}  " + " ".join(f"{v:>{width}d}" for v in row))
        lines.append("per-rule firing (covered/correct):")
        for r in self.per_rule:
            lines.append(f"  rule {r['rule']:>2} {r['class']}: {r['covered']}/{r['correct']}")
        return "\n".join(lines)


def evaluate(rs: RuleSet, ds: Dataset) -> EvalReport:
    if ds.alphabet != rs.alphabet:
        raise AlphabetMismatchError(f"dataset alphabet {ds.alphabet} != rule set alphabet {rs.alphabet}")
    k = len(rs.alphabet)
    fired = fired_rules(rs, ds.X)
    rule_codes = np.array([rs.alphabet.index(r.predicted_class) for r in rs.rules], dtype=np.int64)
    pred = rule_codes[fired] if len(ds) else np.empty(0, dtype=np.int64)
    confusion = np.zeros((k, k), dtype=np.int64)
    np.add.at(confusion, (ds.y, pred), 1)
    correct = pred == ds.y
    per_rule = []
    for i, rule in enumerate(rs.rules):
        m = fired == i
        per_rule.append({"rule": i, "class": rule.predicted_class, "kind": rule.kind,
                         "covered": int(m.sum()), "correct": int((m & correct).sum())})
    col = confusion.sum(axis=0)
    row = confusion.sum(axis=1)
    diag = np.diag(confusion)
    precision = {c: float(diag[i] / col[i]) if col[i] else 0.0 for i, c in enumerate(rs.alphabet)}
    recall = {c: float(diag[i] / row[i]) if row[i] else 0.0 for i, c in enumerate(rs.alphabet)}
    accuracy = float(diag.sum() / len(ds)) if len(ds) else 0.0
    return EvalReport(rs.alphabet, accuracy, confusion, per_rule, precision, recall)
