"""Text formats: the versioned rule file, ``key = value`` config files, and pretty-printing.

Rule file layout::

    mira-rules v1
    alphabet = SwipeLeft,SwipeRight,SwipeUp,SwipeDown,Push
    max_rules = 15
    ...
    RULE 0 specific IF azimuth <= -0.3 AND range > 0.25 THEN SwipeLeft ; train=40/39 val=9/9
    ELSE Push ; train=7/4 val=3/2

Thresholds are written with ``repr`` (shortest round-trip decimal), so a
saved rule set reloads bit-exactly. ``val=-`` marks a rule without
validation statistics.
"""

from __future__ import annotations

import re
from dataclasses import fields
from pathlib import Path

from .core import (
    DEFAULT,
    RULE_KINDS,
    ConfigError,
    InductionConfig,
    Literal,
    Rule,
    RuleFileError,
    RuleSet,
    RuleStats,
    validate_config,
)

MAGIC = "mira-rules v1"

_CONFIG_TYPES = {f.name: f.type for f in fields(InductionConfig)}


def _coerce(key: str, text: str):
    kind = _CONFIG_TYPES[key]
    try:
        if kind == "bool":
            low = text.lower()
            if low in ("true", "1", "yes"):
                return True
            if low in ("false", "0", "no"):
                return False
            raise ValueError(text)
        if kind == "int":
            return int(text)
        if kind == "float":
            return float(text)
        return text
    except ValueError:
        raise ConfigError(f"{key}: invalid value {text!r}") from None


def parse_config_lines(lines, start_line: int = 1) -> InductionConfig:
    values = {}
    for lineno, raw in enumerate(lines, start=start_line):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _CONFIG_TYPES:
            raise ConfigError(f"line {lineno}: unknown config key {key!r}")
        values[key] = _coerce(key, value)
    return validate_config(InductionConfig(**values))


def load_config(path) -> InductionConfig:
    return parse_config_lines(Path(path).read_text(encoding="utf-8").splitlines())


def format_config(cfg: InductionConfig) -> str:
    out = []
    for key, value in cfg.items():
        if isinstance(value, bool):
            value = str(value).lower()
        elif isinstance(value, float):
            value = repr(value)
        out.append(f"{key} = {value}")
    return "\n".join(out)


def _fmt_stats(stats: RuleStats | None) -> str:
    return "-" if stats is None else f"{stats.covered}/{stats.correct}"


def format_rule_line(index: int, rule: Rule) -> str:
    tail = f" ; train={_fmt_stats(rule.train_stats)} val={_fmt_stats(rule.val_stats)}"
    if rule.is_default:
        return f"ELSE {rule.predicted_class}{tail}"
    body = " AND ".join(f"{lit.feature} {lit.op} {lit.threshold!r}" for lit in rule.literals)
    return f"RULE {index} {rule.kind} IF {body} THEN {rule.predicted_class}{tail}"


def dumps(rs: RuleSet) -> str:
    lines = [MAGIC, "alphabet = " + ",".join(rs.alphabet), format_config(rs.config)]
    lines += [format_rule_line(i, r) for i, r in enumerate(rs.rules)]
    return "\n".join(lines) + "\n"


def save(rs: RuleSet, path) -> None:
    Path(path).write_text(dumps(rs), encoding="utf-8")


_RULE_RE = re.compile(r"^RULE (\d+) (\w+) IF (.+) THEN (\S+)$")
_LIT_RE = re.compile(r"^(\w+) (<=|>) (\S+)$")
_STATS_RE = re.compile(r"^(?:(\d+)/(\d+)|-)$")


def _parse_stats(text: str, lineno: int) -> RuleStats | None:
    m = _STATS_RE.match(text)
    if not m:
        raise RuleFileError(f"line {lineno}: bad statistics {text!r}")
    if m.group(1) is None:
        return None
    return RuleStats(int(m.group(1)), int(m.group(2)))


def _split_tail(line: str, lineno: int):
    head, sep, tail = line.partition(" ; ")
    if not sep:
        return head.strip(), None, None
    stats = dict(part.split("=", 1) for part in tail.split() if "=" in part)
    if set(stats) - {"train", "val"}:
        raise RuleFileError(f"line {lineno}: unknown statistics in {tail!r}")
    return (head.strip(), _parse_stats(stats.get("train", "-"), lineno),
            _parse_stats(stats.get("val", "-"), lineno))


def loads(text: str) -> RuleSet:
    lines = text.splitlines()
    if not lines or lines[0].strip() != MAGIC:
        raise RuleFileError(f"line 1: expected header {MAGIC!r}")
    if len(lines) < 2 or not lines[1].startswith("alphabet ="):
        raise RuleFileError("line 2: expected 'alphabet = ...'")
    alphabet = tuple(s.strip() for s in lines[1].split("=", 1)[1].split(",") if s.strip())
    config_lines, rules = [], []
    first_rule = None
    for lineno, raw in enumerate(lines[2:], start=3):
        line = raw.strip()
        if not line:
            continue
        if line.startswith(("RULE ", "ELSE ")):
            first_rule = first_rule or lineno
            try:
                head, train, val = _split_tail(line, lineno)
                if head.startswith("ELSE "):
                    rules.append(Rule((), head[5:].strip(), DEFAULT, train, val))
                    continue
                m = _RULE_RE.match(head)
                if not m:
                    raise RuleFileError(f"line {lineno}: malformed rule {head!r}")
                idx, kind, body, label = m.groups()
                if int(idx) != len(rules):
                    raise RuleFileError(f"line {lineno}: rule index {idx} out of order")
                if kind not in RULE_KINDS or kind == DEFAULT:
                    raise RuleFileError(f"line {lineno}: bad rule kind {kind!r}")
                lits = []
                for part in body.split(" AND "):
                    lm = _LIT_RE.match(part.strip())
                    if not lm:
                        raise RuleFileError(f"line {lineno}: malformed literal {part!r}")
                    lits.append(Literal(lm.group(1), lm.group(2), float(lm.group(3))))
                rules.append(Rule(tuple(lits), label, kind, train, val))
            except RuleFileError:
                raise
            except ValueError as exc:
                raise RuleFileError(f"line {lineno}: {exc}") from None
        elif first_rule is not None:
            raise RuleFileError(f"line {lineno}: unexpected content after rules: {line!r}")
        else:
            config_lines.append((lineno, raw))
    try:
        cfg = parse_config_lines([r for _, r in config_lines], config_lines[0][0] if config_lines else 3)
        return RuleSet(tuple(rules), cfg, alphabet)
    except RuleFileError:
        raise
    except ValueError as exc:
        raise RuleFileError(str(exc)) from None


def load(path) -> RuleSet:
    return loads(Path(path).read_text(encoding="utf-8"))


def pretty(rs: RuleSet) -> str:
    """One line per rule: ``IF ... THEN C`` / ``ELSE C`` followed by kind tag and stats."""
    lines = []
    width = max(len(str(r)) for r in rs.rules)
    for rule in rs.rules:
        stats = f"train={_fmt_stats(rule.train_stats)} val={_fmt_stats(rule.val_stats)}"
        lines.append(f"{str(rule):<{width}}  [{rule.kind}] {stats}")
    return "\n".join(lines)
