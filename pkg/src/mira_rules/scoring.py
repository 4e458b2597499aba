"""Rule-quality metrics: confusion counts, F-Beta, coverage and accuracy."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Dataset, MiraError, Rule


class UncoveredRuleError(MiraError):
    """Accuracy requested for a rule that covers no samples."""


@dataclass(frozen=True)
class RuleConfusion:
    tp: int
    fp: int
    fn_: int
    tn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.fn_, self.tn) < 0:
            raise MiraError(f"negative confusion count: {self}")

    @property
    def covered(self) -> int:
        return self.tp + self.fp

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn_ + self.tn


def rule_confusion(rule: Rule, target: str, ds: Dataset) -> RuleConfusion:
    covered = rule.mask(ds.X)
    is_target = ds.y == ds.code(target)
    tp = int(np.count_nonzero(covered & is_target))
    fp = int(np.count_nonzero(covered & ~is_target))
    fn_ = int(np.count_nonzero(~covered & is_target))
    return RuleConfusion(tp, fp, fn_, len(ds) - tp - fp - fn_)


def fbeta_counts(tp, fp, fn_, beta: float):
    """Vectorised F-Beta from raw counts; 0 wherever ``tp == 0``.

    Uses ``(1+b^2) tp / ((1+b^2) tp + b^2 fn + fp)``, the expansion of the
    precision/recall form.
    """
    tp = np.asarray(tp, dtype=np.float64)
    b2 = beta * beta
    num = (1.0 + b2) * tp
    den = num + b2 * np.asarray(fn_, dtype=np.float64) + np.asarray(fp, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(tp > 0, num / np.where(den > 0, den, 1.0), 0.0)
    return out if out.ndim else float(out)


def fbeta(c: RuleConfusion, beta: float) -> float:
    return float(fbeta_counts(c.tp, c.fp, c.fn_, beta))


def rule_coverage(c: RuleConfusion) -> float:
    if c.total < 1:
        raise MiraError("coverage of an empty dataset is undefined")
    return c.covered / c.total


def rule_accuracy(c: RuleConfusion) -> float:
    if c.covered < 1:
        raise UncoveredRuleError("rule covers no samples")
    return c.tp / c.covered
