"""Per-class silhouette and the size-weighted score used to pick the next target class."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import (
    FEATURES,
    DegenerateClassError,
    FeatureVector,
    InductionConfig,
    Dataset,
    SingleClassRemainder,
)


@dataclass(frozen=True)
class ClassScore:
    label: str
    sc: float
    weighted: float
    n_class: int
    n_left: int


def pairwise_distance(x: FeatureVector, y: FeatureVector) -> float:
    return math.dist(x.to_array(), y.to_array())


def feature_scale(ds: Dataset) -> tuple[np.ndarray, np.ndarray]:
    """Per-feature mean and std for z-scoring; zero-variance features keep unit scale."""
    if len(ds) == 0:
        return np.zeros(len(FEATURES)), np.ones(len(FEATURES))
    mean = ds.X.mean(axis=0)
    std = ds.X.std(axis=0)
    return mean, np.where(std > 0, std, 1.0)


def _silhouettes_from_sums(sums: np.ndarray, codes: np.ndarray, counts: np.ndarray, mode: str) -> np.ndarray:
    """Per-sample silhouette values given the class distance sums."""
    n = codes.shape[0]
    rows = np.arange(n)
    own = counts[codes]
    within = sums[rows, codes]
    with np.errstate(divide="ignore", invalid="ignore"):
        a = np.where(own > 1, within / np.maximum(own - 1, 1), 0.0)
        if mode == "pooled":
            b = (sums.sum(axis=1) - within) / (n - own)
        else:
            means = sums / counts[None, :]
            means[:, counts == 0] = np.inf
            means[rows, codes] = np.inf
            b = means.min(axis=1)
        top = np.maximum(a, b)
        s = np.where(top > 0, (b - a) / np.where(top > 0, top, 1.0), 0.0)
    return s


def _class_silhouettes(ds: Dataset, mode: str = "pooled", scale=None) -> np.ndarray:
    """Silhouette of every class in ``ds`` (NaN where undefined)."""
    X = ds.X if scale is None else (ds.X - scale[0]) / scale[1]
    counts = ds.counts
    sums = _kernels.class_distance_sums(X, ds.y, len(ds.alphabet))
    s = _silhouettes_from_sums(sums, ds.y, counts, mode)
    out = np.full(len(ds.alphabet), np.nan)
    n = len(ds)
    for c in range(len(ds.alphabet)):
        if counts[c] >= 2 and n - counts[c] >= 1:
            out[c] = s[ds.y == c].mean()
    return out


def class_silhouette(ds: Dataset, label: str, mode: str = "pooled", scale=None) -> float:
    """Mean silhouette over the members of class ``label``.

    ``a`` is the mean distance to the other members of the class. ``b`` is the
    mean distance to every sample outside it (``mode="pooled"``) or the
    smallest per-class mean distance (``mode="nearest"``).
    """
    c = ds.code(label)
    if ds.counts[c] < 2:
        raise DegenerateClassError(f"class {label!r} has {ds.counts[c]} samples, need >= 2")
    if len(ds) - ds.counts[c] < 1:
        raise DegenerateClassError(f"no samples outside class {label!r}")
    return float(_class_silhouettes(ds, mode, scale)[c])


def weighted_silhouette(sc: float, n_class: int, n_left: int, cfg: InductionConfig) -> float:
    return cfg.lambda1 * math.sqrt(cfg.lambda2 * n_class / n_left) + cfg.lambda3 * sc


def score_classes(remaining: Dataset, cfg: InductionConfig, scale=None) -> list[ClassScore]:
    """Score every class with at least two remaining samples, in alphabet order."""
    n_left = len(remaining)
    if len(remaining.present_classes()) < 2:
        return []
    sils = _class_silhouettes(remaining, cfg.silhouette_mode, scale)
    scores = []
    for c, label in enumerate(remaining.alphabet):
        n_c = int(remaining.counts[c])
        if n_c < 2:
            continue
        sc = float(sils[c])
        scores.append(ClassScore(label, sc, weighted_silhouette(sc, n_c, n_left, cfg), n_c, n_left))
    return scores


def pick_best(scores: list[ClassScore]) -> ClassScore:
    # max weighted, then larger class, then earliest in alphabet (scores arrive in alphabet order)
    best = scores[0]
    for s in scores[1:]:
        if (s.weighted, s.n_class) > (best.weighted, best.n_class):
            best = s
    return best


def select_target_class(remaining: Dataset, cfg: InductionConfig, scale=None) -> ClassScore:
    scores = score_classes(remaining, cfg, scale)
    if not scores:
        raise SingleClassRemainder(
            f"fewer than two classes can be scored among {len(remaining)} remaining samples"
        )
    return pick_best(scores)
