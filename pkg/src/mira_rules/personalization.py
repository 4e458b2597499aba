"""Per-user rules learned from calibration gestures and spliced before a new default rule."""

from __future__ import annotations

import numpy as np

from .core import PERSONALIZED, AlphabetMismatchError, Dataset, InductionConfig, RuleSet, validate_config
from .induction import InductionTrace, covering_loop, default_rule, personal_config
from .inference import fired_rules


def calibration_residuals(rs: RuleSet, calib: Dataset) -> Dataset:
    """Calibration samples that no non-default rule covers (they fall through to the default)."""
    fired = fired_rules(rs, calib.X)
    return calib.subset(np.flatnonzero(fired == len(rs.rules) - 1))


def personalize(rs: RuleSet, calib: Dataset, cfg: InductionConfig | None = None,
                return_trace: bool = False):
    """Append up to ``cfg.max_personal_rules`` rules induced on the calibration residual.

    The foundational rules are kept verbatim and in order; only the default
    rule is replaced, by a majority vote over the residual that the new rules
    leave uncovered (or the old default class when nothing is left).
    """
    cfg = validate_config(cfg or rs.config)
    if calib.alphabet != rs.alphabet:
        raise AlphabetMismatchError(f"calibration alphabet {calib.alphabet} != rule set alphabet {rs.alphabet}")
    residual = calibration_residuals(rs, calib)
    if len(residual) == 0:
        return (rs, InductionTrace(stop_reason="empty residual")) if return_trace else rs
    pcfg = personal_config(cfg, len(residual))
    new_rules, left, _, trace = covering_loop(residual, None, pcfg, PERSONALIZED)
    default = default_rule(left, rs.default.predicted_class)
    out = RuleSet(rs.body + tuple(new_rules) + (default,), rs.config, rs.alphabet)
    return (out, trace) if return_trace else out
