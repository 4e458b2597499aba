"""Domain types shared by every module.

Samples are stored column-wise in :class:`Dataset` (an ``(n, 5)`` float array
plus integer class codes) so the hot paths never touch per-sample objects.
:class:`FeatureVector` and :class:`LabeledSample` are thin views for callers
that want one gesture at a time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace
from typing import Iterable, Sequence

import numpy as np

FEATURES: tuple[str, ...] = ("range", "doppler", "azimuth", "elevation", "peak")
FEATURE_INDEX: dict[str, int] = {name: i for i, name in enumerate(FEATURES)}
N_FEATURES = len(FEATURES)

DEFAULT_GESTURES: tuple[str, ...] = ("SwipeLeft", "SwipeRight", "SwipeUp", "SwipeDown", "Push")

OPS = ("<=", ">")


class MiraError(ValueError):
    """Base class for all errors raised by this package."""


class ConfigError(MiraError):
    pass


class DataError(MiraError):
    pass


class AlphabetMismatchError(MiraError):
    pass


class DegenerateClassError(MiraError):
    pass


class SingleClassRemainder(MiraError):
    """Raised when target selection has fewer than two scorable classes."""


class RuleFileError(MiraError):
    pass


@dataclass(frozen=True)
class FeatureVector:
    range: float
    doppler: float
    azimuth: float
    elevation: float
    peak: float

    def __post_init__(self):
        for name in FEATURES:
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise DataError(f"feature {name} is not finite: {value!r}")
            object.__setattr__(self, name, value)

    @classmethod
    def from_array(cls, values) -> "FeatureVector":
        values = np.asarray(values, dtype=np.float64).ravel()
        if values.shape != (N_FEATURES,):
            raise DataError(f"expected {N_FEATURES} features, got shape {values.shape}")
        return cls(*values.tolist())

    def to_array(self) -> np.ndarray:
        return np.array([getattr(self, name) for name in FEATURES], dtype=np.float64)

    def __getitem__(self, key):
        if isinstance(key, str):
            return getattr(self, key)
        return getattr(self, FEATURES[key])


@dataclass(frozen=True)
class GestureRecording:
    """Frame-level recording: ``frames`` is ``(n_frames, 5)``; window is ``[start, end)``."""

    frames: np.ndarray
    start: int
    end: int

    def __post_init__(self):
        frames = np.array(self.frames, dtype=np.float64)
        if frames.ndim != 2 or frames.shape[1] != N_FEATURES:
            raise DataError(f"frames must have shape (n_frames, {N_FEATURES}), got {frames.shape}")
        if not np.all(np.isfinite(frames)):
            raise DataError("recording contains non-finite feature values")
        if not 0 <= self.start < self.end <= frames.shape[0]:
            raise DataError(
                f"invalid gesture window [{self.start}, {self.end}) for {frames.shape[0]} frames"
            )
        frames.setflags(write=False)
        object.__setattr__(self, "frames", frames)

    @property
    def n_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def window_length(self) -> int:
        return self.end - self.start


@dataclass(frozen=True)
class LabeledSample:
    features: FeatureVector
    label: str
    user_id: str
    location_id: str
    sample_id: int


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


class Dataset:
    """Immutable labelled collection over a closed, ordered class alphabet.

    Parameters
    ----------
    X : array-like, shape (n, 5)
        Feature matrix in :data:`FEATURES` order.
    y : array-like of int, shape (n,)
        Class codes indexing ``alphabet``.
    alphabet : sequence of str
        Ordered class names.
    users, locations : sequence of str, optional
        Provenance per sample; default to empty strings.
    sample_ids : array-like of int, optional
        Unique ids; default to ``0..n-1``.
    """

    def __init__(self, X, y, alphabet: Sequence[str], users=None, locations=None, sample_ids=None):
        alphabet = tuple(str(a) for a in alphabet)
        if not alphabet:
            raise DataError("alphabet must be non-empty")
        if len(set(alphabet)) != len(alphabet):
            raise DataError(f"alphabet has duplicate classes: {alphabet}")
        X = np.array(X, dtype=np.float64).reshape(-1, N_FEATURES)
        y = np.array(y, dtype=np.int64).reshape(-1)
        n = X.shape[0]
        if y.shape[0] != n:
            raise DataError(f"{n} feature rows but {y.shape[0]} labels")
        if n and (y.min() < 0 or y.max() >= len(alphabet)):
            raise DataError("label code outside alphabet")
        if not np.all(np.isfinite(X)):
            raise DataError("feature matrix contains non-finite values")
        users = np.array([""] * n if users is None else list(users), dtype=object)
        locations = np.array([""] * n if locations is None else list(locations), dtype=object)
        if sample_ids is None:
            sample_ids = np.arange(n, dtype=np.int64)
        else:
            sample_ids = np.array(sample_ids, dtype=np.int64).reshape(-1)
        if users.shape[0] != n or locations.shape[0] != n or sample_ids.shape[0] != n:
            raise DataError("provenance columns must match the number of samples")
        if np.unique(sample_ids).shape[0] != n:
            raise DataError("sample_id values must be unique")
        self.X = _frozen(X)
        self.y = _frozen(y)
        self.alphabet = alphabet
        self.users = _frozen(users)
        self.locations = _frozen(locations)
        self.sample_ids = _frozen(sample_ids)
        self._counts = _frozen(np.bincount(y, minlength=len(alphabet)).astype(np.int64))

    @classmethod
    def from_samples(cls, samples: Iterable[LabeledSample], alphabet: Sequence[str]) -> "Dataset":
        samples = list(samples)
        index = {c: i for i, c in enumerate(alphabet)}
        try:
            y = [index[s.label] for s in samples]
        except KeyError as exc:
            raise AlphabetMismatchError(f"label {exc.args[0]!r} not in alphabet {tuple(alphabet)}") from None
        return cls(
            np.array([s.features.to_array() for s in samples]).reshape(-1, N_FEATURES),
            y,
            alphabet,
            users=[s.user_id for s in samples],
            locations=[s.location_id for s in samples],
            sample_ids=[s.sample_id for s in samples],
        )

    def __len__(self) -> int:
        return self.X.shape[0]

    def __getitem__(self, i: int) -> LabeledSample:
        return LabeledSample(
            FeatureVector.from_array(self.X[i]),
            self.alphabet[self.y[i]],
            self.users[i],
            self.locations[i],
            int(self.sample_ids[i]),
        )

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            self.alphabet == other.alphabet
            and np.array_equal(self.X, other.X)
            and np.array_equal(self.y, other.y)
            and np.array_equal(self.users, other.users)
            and np.array_equal(self.locations, other.locations)
            and np.array_equal(self.sample_ids, other.sample_ids)
        )

    def __repr__(self):
        return f"Dataset(n={len(self)}, counts={self.class_counts()})"

    @property
    def labels(self) -> list[str]:
        return [self.alphabet[c] for c in self.y]

    def code(self, label: str) -> int:
        try:
            return self.alphabet.index(label)
        except ValueError:
            raise AlphabetMismatchError(f"class {label!r} not in alphabet {self.alphabet}") from None

    def count(self, label: str) -> int:
        return int(self._counts[self.code(label)])

    @property
    def counts(self) -> np.ndarray:
        """Per-class sample counts in alphabet order."""
        return self._counts

    def class_counts(self) -> dict[str, int]:
        return {c: int(n) for c, n in zip(self.alphabet, self._counts)}

    def present_classes(self) -> list[str]:
        return [c for c, n in zip(self.alphabet, self._counts) if n > 0]

    def subset(self, idx) -> "Dataset":
        idx = np.asarray(idx)
        return Dataset(
            self.X[idx], self.y[idx], self.alphabet,
            users=self.users[idx], locations=self.locations[idx], sample_ids=self.sample_ids[idx],
        )

    def with_alphabet(self, alphabet: Sequence[str]) -> "Dataset":
        """Re-code labels against another alphabet (must be a superset)."""
        alphabet = tuple(alphabet)
        if alphabet == self.alphabet:
            return self
        remap = np.array([alphabet.index(c) if c in alphabet else -1 for c in self.alphabet], dtype=np.int64)
        missing = [c for c, r in zip(self.alphabet, remap) if r < 0 and self.count(c) > 0]
        if missing:
            raise AlphabetMismatchError(f"classes {missing} not in alphabet {alphabet}")
        return Dataset(self.X, remap[self.y] if len(self) else self.y, alphabet,
                       users=self.users, locations=self.locations, sample_ids=self.sample_ids)


@dataclass(frozen=True)
class Literal:
    feature: str
    op: str
    threshold: float

    def __post_init__(self):
        if self.feature not in FEATURE_INDEX:
            raise MiraError(f"unknown feature {self.feature!r}")
        if self.op not in OPS:
            raise MiraError(f"unknown operator {self.op!r}")
        threshold = float(self.threshold)
        if not math.isfinite(threshold):
            raise MiraError(f"threshold must be finite, got {threshold!r}")
        object.__setattr__(self, "threshold", threshold)

    @property
    def feature_index(self) -> int:
        return FEATURE_INDEX[self.feature]

    def holds(self, value: float) -> bool:
        return value <= self.threshold if self.op == "<=" else value > self.threshold

    def mask(self, X: np.ndarray) -> np.ndarray:
        col = X[:, self.feature_index]
        return col <= self.threshold if self.op == "<=" else col > self.threshold

    def __str__(self):
        return f"{self.feature} {self.op} {self.threshold!r}"


@dataclass(frozen=True)
class RuleStats:
    covered: int
    correct: int

    def __post_init__(self):
        if not 0 <= self.correct <= self.covered:
            raise MiraError(f"invalid rule stats: correct={self.correct}, covered={self.covered}")


SPECIFIC, DEFAULT, PERSONALIZED = "specific", "default", "personalized"
RULE_KINDS = (SPECIFIC, DEFAULT, PERSONALIZED)


@dataclass(frozen=True)
class Rule:
    literals: tuple[Literal, ...]
    predicted_class: str
    kind: str = SPECIFIC
    train_stats: RuleStats | None = None
    val_stats: RuleStats | None = None

    def __post_init__(self):
        object.__setattr__(self, "literals", tuple(self.literals))
        if self.kind not in RULE_KINDS:
            raise MiraError(f"unknown rule kind {self.kind!r}")
        if self.kind == DEFAULT and self.literals:
            raise MiraError("the default rule must have no literals")

    @property
    def is_default(self) -> bool:
        return self.kind == DEFAULT

    def matches(self, x: FeatureVector) -> bool:
        return all(lit.holds(x[lit.feature]) for lit in self.literals)

    def mask(self, X: np.ndarray) -> np.ndarray:
        m = np.ones(X.shape[0], dtype=bool)
        for lit in self.literals:
            m &= lit.mask(X)
        return m

    def __str__(self):
        if self.is_default:
            return f"ELSE {self.predicted_class}"
        body = " AND ".join(str(lit) for lit in self.literals) or "TRUE"
        return f"IF {body} THEN {self.predicted_class}"


@dataclass(frozen=True)
class InductionConfig:
    max_rules: int = 15
    max_literals: int = 2
    min_train_coverage: int = 8
    min_val_coverage: int = 5
    min_val_accuracy: float = 0.70
    min_train_remaining: int = 6
    min_val_remaining: int = 2
    beta: float = 0.3
    lambda1: float = 0.5
    lambda2: float = 10.0
    lambda3: float = 0.7
    max_personal_rules: int = 4
    seed: int = 0
    # silhouette variants: "pooled" averages b over all other classes, "nearest" takes the min class mean
    silhouette_mode: str = "pooled"
    normalize: bool = False
    personal_min_coverage_frac: float = 0.08
    personal_min_coverage_floor: int = 2
    personal_min_train_remaining: int = 2

    def replace(self, **changes) -> "InductionConfig":
        return replace(self, **changes)

    def items(self):
        return [(f.name, getattr(self, f.name)) for f in fields(self)]


_COUNT_FIELDS = (
    "max_rules", "max_literals", "min_train_coverage", "min_val_coverage",
    "min_train_remaining", "min_val_remaining", "max_personal_rules",
    "personal_min_coverage_floor", "personal_min_train_remaining",
)
_UNIT_FIELDS = ("min_val_accuracy", "lambda1", "lambda3", "personal_min_coverage_frac")


def validate_config(cfg: InductionConfig) -> InductionConfig:
    """Return ``cfg`` unchanged if every bound holds, else raise :class:`ConfigError`."""
    for name in _COUNT_FIELDS:
        value = getattr(cfg, name)
        if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 1:
            raise ConfigError(f"{name} must be an integer >= 1, got {value!r}")
    for name in _UNIT_FIELDS:
        value = getattr(cfg, name)
        if not (isinstance(value, (int, float)) and 0.0 <= value <= 1.0):
            raise ConfigError(f"{name} out of [0,1]: {value!r}")
    for name in ("beta", "lambda2"):
        value = getattr(cfg, name)
        if not (isinstance(value, (int, float)) and math.isfinite(value) and value >= 0.0):
            raise ConfigError(f"{name} out of [0,inf): {value!r}")
    if isinstance(cfg.seed, bool) or not isinstance(cfg.seed, (int, np.integer)):
        raise ConfigError(f"seed must be an integer, got {cfg.seed!r}")
    if cfg.silhouette_mode not in ("pooled", "nearest"):
        raise ConfigError(f"silhouette_mode must be 'pooled' or 'nearest', got {cfg.silhouette_mode!r}")
    if not isinstance(cfg.normalize, bool):
        raise ConfigError(f"normalize must be a boolean, got {cfg.normalize!r}")
    return cfg


@dataclass(frozen=True)
class RuleSet:
    """Ordered decision list ending in exactly one default rule."""

    rules: tuple[Rule, ...]
    config: InductionConfig = field(default_factory=InductionConfig)
    alphabet: tuple[str, ...] = DEFAULT_GESTURES

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        self.check()

    def check(self) -> None:
        if not self.rules or not self.rules[-1].is_default:
            raise MiraError("a rule set must end with a default rule")
        if sum(r.is_default for r in self.rules) != 1:
            raise MiraError("a rule set must contain exactly one default rule")
        n_specific = sum(r.kind == SPECIFIC for r in self.rules)
        if n_specific > self.config.max_rules:
            raise MiraError(f"{n_specific} specific rules exceed max_rules={self.config.max_rules}")
        for i, rule in enumerate(self.rules):
            if rule.predicted_class not in self.alphabet:
                raise MiraError(f"rule {i} predicts {rule.predicted_class!r}, not in alphabet")
            if not rule.is_default and not rule.literals:
                raise MiraError(f"rule {i} ({rule.kind}) has no literals")
            if len(rule.literals) > self.config.max_literals:
                raise MiraError(f"rule {i} has {len(rule.literals)} literals > max_literals")

    @property
    def default(self) -> Rule:
        return self.rules[-1]

    @property
    def body(self) -> tuple[Rule, ...]:
        """All rules except the trailing default."""
        return self.rules[:-1]

    def __len__(self):
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)

    def __str__(self):
        return "\n".join(str(r) for r in self.rules)
