"""Ingestion, feature distillation, splitting and a synthetic gesture generator.

Samples CSV columns: ``user,location,label,range,doppler,azimuth,elevation,peak``.
Recordings CSV adds ``recording_id,frame_idx`` plus ``gesture_start,gesture_end``
filled on the first row of each recording. Sample ids are assigned as the
0-based data-row index, so writing and re-reading a dataset is lossless.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .core import (
    DEFAULT_GESTURES,
    FEATURES,
    N_FEATURES,
    AlphabetMismatchError,
    DataError,
    Dataset,
    FeatureVector,
    GestureRecording,
)

SAMPLE_COLUMNS = ("user", "location", "label") + FEATURES
RECORDING_COLUMNS = ("recording_id", "frame_idx") + SAMPLE_COLUMNS + ("gesture_start", "gesture_end")
GESTURE_FRAMES = 10


def average_frames(rec: GestureRecording) -> FeatureVector:
    """Mean of each feature over the gesture window only."""
    if rec.end <= rec.start:
        raise DataError("empty gesture window")
    window = rec.frames[rec.start:rec.end]
    # centring on the first frame keeps constant windows exact
    return FeatureVector.from_array(window[0] + (window - window[0]).mean(axis=0))


def _infer_alphabet(labels: Sequence[str]) -> tuple[str, ...]:
    seen = set(labels)
    if seen <= set(DEFAULT_GESTURES):
        return DEFAULT_GESTURES
    return tuple(sorted(seen))


def _parse_float(text: str, lineno: int, column: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise DataError(f"line {lineno}: column {column!r}: not a number: {text!r}") from None
    if not math.isfinite(value):
        raise DataError(f"line {lineno}: column {column!r}: non-finite value {text!r}")
    return value


def _open_rows(path, required):
    text = Path(path).read_text(encoding="utf-8")
    reader = csv.reader(io.StringIO(text))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise DataError(f"{path}: empty file (header required)") from None
    missing = [c for c in required if c not in header]
    if missing:
        raise DataError(f"{path}: missing column(s) {', '.join(missing)}")
    col = {name: header.index(name) for name in header}
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != len(header):
            raise DataError(f"line {lineno}: expected {len(header)} fields, got {len(row)}")
        rows.append((lineno, row))
    return col, rows


def load_samples_csv(path, alphabet: Sequence[str] | None = None) -> Dataset:
    """Parse a samples CSV.

    With ``alphabet`` given, unknown labels are an error and the dataset uses
    that alphabet. Otherwise the five default gestures are used when they
    cover every label, else the sorted set of labels.
    """
    col, rows = _open_rows(path, SAMPLE_COLUMNS)
    X = np.empty((len(rows), N_FEATURES))
    labels, users, locations = [], [], []
    for k, (lineno, row) in enumerate(rows):
        for f, name in enumerate(FEATURES):
            X[k, f] = _parse_float(row[col[name]], lineno, name)
        label = row[col["label"]].strip()
        if not label:
            raise DataError(f"line {lineno}: column 'label': empty")
        if alphabet is not None and label not in alphabet:
            raise AlphabetMismatchError(f"line {lineno}: label {label!r} not in alphabet {tuple(alphabet)}")
        labels.append(label)
        users.append(row[col["user"]].strip())
        locations.append(row[col["location"]].strip())
    alphabet = tuple(alphabet) if alphabet is not None else _infer_alphabet(labels)
    index = {c: i for i, c in enumerate(alphabet)}
    return Dataset(X, [index[c] for c in labels], alphabet, users=users, locations=locations)


def _fmt(value: float) -> str:
    return repr(float(value))


def write_samples_csv(ds: Dataset, path) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SAMPLE_COLUMNS)
    for i in range(len(ds)):
        writer.writerow([ds.users[i], ds.locations[i], ds.alphabet[ds.y[i]]] + [_fmt(v) for v in ds.X[i]])
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


@dataclass
class RecordingRow:
    recording: GestureRecording
    label: str
    user: str
    location: str


def load_recordings_csv(path, gesture_length: int | None = GESTURE_FRAMES) -> list[RecordingRow]:
    """Parse a frame-level CSV into recordings (ordered by first appearance).

    ``gesture_length`` enforces the window length; pass ``None`` to accept any.
    """
    col, rows = _open_rows(path, RECORDING_COLUMNS)
    groups: dict[str, dict] = {}
    for lineno, row in rows:
        rid = row[col["recording_id"]].strip()
        try:
            frame_idx = int(row[col["frame_idx"]])
        except ValueError:
            raise DataError(f"line {lineno}: column 'frame_idx': not an integer") from None
        feats = [_parse_float(row[col[name]], lineno, name) for name in FEATURES]
        g = groups.get(rid)
        if g is None:
            g = groups[rid] = {
                "label": row[col["label"]].strip(), "user": row[col["user"]].strip(),
                "location": row[col["location"]].strip(), "frames": {}, "window": None, "line": lineno,
            }
        start, end = row[col["gesture_start"]].strip(), row[col["gesture_end"]].strip()
        if start or end:
            try:
                g["window"] = (int(start), int(end))
            except ValueError:
                raise DataError(f"line {lineno}: gesture_start/gesture_end must be integers") from None
        if frame_idx in g["frames"]:
            raise DataError(f"line {lineno}: duplicate frame {frame_idx} in recording {rid!r}")
        g["frames"][frame_idx] = feats
    out = []
    for rid, g in groups.items():
        if g["window"] is None:
            raise DataError(f"line {g['line']}: recording {rid!r} has no gesture window")
        idx = sorted(g["frames"])
        if idx != list(range(len(idx))):
            raise DataError(f"recording {rid!r}: frame indices must be 0..n-1")
        rec = GestureRecording(np.array([g["frames"][i] for i in idx]), *g["window"])
        if gesture_length is not None and rec.window_length != gesture_length:
            raise DataError(f"recording {rid!r}: window length {rec.window_length} != {gesture_length}")
        out.append(RecordingRow(rec, g["label"], g["user"], g["location"]))
    return out


def distill(recordings: Sequence[RecordingRow], alphabet: Sequence[str] | None = None) -> Dataset:
    """Average every recording over its gesture window into a sample-level dataset."""
    labels = [r.label for r in recordings]
    if alphabet is None:
        alphabet = _infer_alphabet(labels)
    elif not set(labels) <= set(alphabet):
        raise AlphabetMismatchError(f"labels {sorted(set(labels) - set(alphabet))} not in alphabet")
    alphabet = tuple(alphabet)
    X = np.array([average_frames(r.recording).to_array() for r in recordings]).reshape(-1, N_FEATURES)
    return Dataset(X, [alphabet.index(c) for c in labels], alphabet,
                   users=[r.user for r in recordings], locations=[r.location for r in recordings])


def _round_table(class_sizes: np.ndarray, part_sizes: list[int]) -> np.ndarray:
    """Integer class-by-partition counts with exact margins, each within one of its quota.

    Quotas are floored and the leftover units placed by augmenting paths over the
    cells whose quota is fractional (a 0/1 bipartite flow), which always succeeds.
    """
    n = class_sizes.sum()
    quota = np.outer(class_sizes, part_sizes) / max(n, 1)
    table = np.floor(quota + 1e-12).astype(np.int64)
    open_cell = quota - table > 1e-12
    row_need = class_sizes - table.sum(axis=1)
    col_need = np.asarray(part_sizes) - table.sum(axis=0)
    extra = np.zeros_like(table)
    for c in range(table.shape[0]):
        for _ in range(int(row_need[c])):
            # BFS from class c over (class -> partition via free open cell, partition -> class via used cell)
            prev = {("c", c): None}
            queue = [("c", c)]
            found = None
            while queue and found is None:
                node = queue.pop(0)
                if node[0] == "c":
                    for p in range(table.shape[1]):
                        nxt = ("p", p)
                        if open_cell[node[1], p] and not extra[node[1], p] and nxt not in prev:
                            prev[nxt] = node
                            if col_need[p] > 0:
                                found = nxt
                                break
                            queue.append(nxt)
                else:
                    for k in range(table.shape[0]):
                        nxt = ("c", k)
                        if extra[k, node[1]] and nxt not in prev:
                            prev[nxt] = node
                            queue.append(nxt)
            if found is None:
                raise DataError("could not balance the stratified split")
            col_need[found[1]] -= 1
            node = found
            while prev[node] is not None:
                back = prev[node]
                if node[0] == "p":
                    extra[back[1], node[1]] = 1
                else:
                    extra[node[1], back[1]] = 0
                node = back
    return table + extra


def split_fractions(ds: Dataset, fractions: Sequence[float], seed: int = 0) -> tuple[Dataset, ...]:
    """Stratified random split into ``len(fractions)`` parts."""
    fractions = [float(f) for f in fractions]
    if any(f < 0 for f in fractions) or abs(sum(fractions) - 1.0) > 1e-9:
        raise DataError(f"fractions must be non-negative and sum to 1, got {fractions}")
    n = len(ds)
    sizes = [int(round(f * n)) for f in fractions[:-1]]
    sizes.append(n - sum(sizes))
    if sizes[-1] < 0:
        raise DataError(f"fractions {fractions} do not fit {n} samples")
    for f, s in zip(fractions, sizes):
        if s == 0:
            raise DataError(f"fraction {f} of {n} samples gives an empty partition")
    rng = np.random.default_rng(seed)
    table = _round_table(ds.counts, sizes)
    parts = [[] for _ in sizes]
    for c in range(len(ds.alphabet)):
        idx = np.flatnonzero(ds.y == c)
        idx = idx[rng.permutation(idx.shape[0])]
        bounds = np.cumsum(np.concatenate([[0], table[c]]))
        for p in range(len(sizes)):
            parts[p].append(idx[bounds[p]:bounds[p + 1]])
    return tuple(ds.subset(np.sort(np.concatenate(chunks))) for chunks in parts)


def split_by_users(ds: Dataset, groups: Sequence[Sequence[str]]) -> tuple[Dataset, ...]:
    """Assign whole users to partitions; samples of unlisted users are dropped."""
    sets = [set(g) for g in groups]
    for i in range(len(sets)):
        for j in range(i + 1, len(sets)):
            if sets[i] & sets[j]:
                raise DataError(f"user(s) {sorted(sets[i] & sets[j])} listed in two partitions")
    out = []
    for s in sets:
        idx = np.flatnonzero(np.isin(ds.users, list(s)))
        if idx.shape[0] == 0:
            raise DataError(f"users {sorted(s)} give an empty partition")
        out.append(ds.subset(idx))
    return tuple(out)


def split(ds: Dataset, spec, seed: int = 0) -> tuple[Dataset, Dataset, Dataset]:
    """``spec`` is either ``{"train_frac", "val_frac", "test_frac"}`` or ``{"by_users": [train, val, test]}``."""
    if "by_users" in spec:
        parts = split_by_users(ds, spec["by_users"])
    else:
        parts = split_fractions(ds, [spec["train_frac"], spec["val_frac"], spec["test_frac"]], seed)
    if len(parts) != 3:
        raise DataError("split must produce exactly three partitions")
    return parts


@dataclass
class SynthSpec:
    """Per-class Gaussian gesture features with per-user offsets.

    ``offsets`` maps a user to a 5-vector applied to every class; ``class_offsets``
    maps ``(user, class)`` to an extra 5-vector. Each location draws one jitter
    vector with standard deviation ``location_jitter``; samples cycle through
    the locations.
    """

    means: dict[str, np.ndarray]
    spread: np.ndarray
    users: list[str] = field(default_factory=lambda: ["u0"])
    locations: list[str] = field(default_factory=lambda: ["l0"])
    samples_per_class_user: int = 100
    offsets: dict[str, np.ndarray] = field(default_factory=dict)
    class_offsets: dict[tuple[str, str], np.ndarray] = field(default_factory=dict)
    location_jitter: float = 0.0

    def __post_init__(self):
        self.means = {c: _vec(v, f"mean.{c}") for c, v in self.means.items()}
        if not self.means:
            raise DataError("synth spec declares no classes")
        spread = np.broadcast_to(np.asarray(self.spread, dtype=np.float64), (N_FEATURES,)).copy()
        if not np.all(spread > 0):
            raise DataError(f"spread must be positive, got {spread.tolist()}")
        self.spread = spread
        self.offsets = {u: _vec(v, f"offset.{u}") for u, v in self.offsets.items()}
        self.class_offsets = {k: _vec(v, f"offset.{k[0]}.{k[1]}") for k, v in self.class_offsets.items()}
        if self.samples_per_class_user < 1:
            raise DataError("samples_per_class_user must be >= 1")
        if self.location_jitter < 0:
            raise DataError("location_jitter must be >= 0")
        if not self.users or not self.locations:
            raise DataError("synth spec needs at least one user and one location")
        for u in list(self.offsets) + [k[0] for k in self.class_offsets]:
            if u not in self.users:
                raise DataError(f"offset given for unknown user {u!r}")
        for _, c in self.class_offsets:
            if c not in self.means:
                raise DataError(f"offset given for unknown class {c!r}")

    @property
    def classes(self) -> tuple[str, ...]:
        return tuple(self.means)

    @property
    def n_samples(self) -> int:
        return len(self.means) * len(self.users) * self.samples_per_class_user


def _vec(value, name) -> np.ndarray:
    v = np.asarray(value, dtype=np.float64).reshape(-1)
    if v.shape != (N_FEATURES,) or not np.all(np.isfinite(v)):
        raise DataError(f"{name}: expected {N_FEATURES} finite numbers")
    return v


def _numbers(text: str) -> list[float]:
    return [float(t) for t in text.replace(",", " ").split()]


def parse_synth_spec(text: str) -> SynthSpec:
    """Parse ``key = value`` lines (``#`` comments allowed).

    Keys: ``mean.<class>``, ``spread``, ``users``, ``locations``,
    ``samples_per_class_user``, ``offset.<user>``, ``offset.<user>.<class>``,
    ``location_jitter``. Class order follows the ``mean.*`` lines.
    """
    kw: dict = {"means": {}, "offsets": {}, "class_offsets": {}}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise DataError(f"synth spec line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        try:
            if key.startswith("mean."):
                kw["means"][key[5:]] = _numbers(value)
            elif key.startswith("offset."):
                parts = key[7:].split(".", 1)
                if len(parts) == 1:
                    kw["offsets"][parts[0]] = _numbers(value)
                else:
                    kw["class_offsets"][tuple(parts)] = _numbers(value)
            elif key == "spread":
                kw["spread"] = _numbers(value)
            elif key in ("users", "locations"):
                kw[key] = [s.strip() for s in value.split(",") if s.strip()]
            elif key == "samples_per_class_user":
                kw[key] = int(value)
            elif key == "location_jitter":
                kw[key] = float(value)
            else:
                raise DataError(f"synth spec line {lineno}: unknown key {key!r}")
        except ValueError as exc:
            if isinstance(exc, DataError):
                raise
            raise DataError(f"synth spec line {lineno}: bad value for {key!r}: {value!r}") from None
    if "spread" not in kw:
        raise DataError("synth spec: missing 'spread'")
    return SynthSpec(**kw)


def synthesize(spec: SynthSpec, seed: int = 0) -> Dataset:
    """Draw ``samples_per_class_user`` samples for every (user, class); rows ordered user-major."""
    rng = np.random.default_rng(seed)
    jitter = {loc: rng.normal(0.0, 1.0, N_FEATURES) * spec.location_jitter for loc in spec.locations}
    classes = spec.classes
    n = spec.samples_per_class_user
    X, y, users, locs = [], [], [], []
    zero = np.zeros(N_FEATURES)
    for user in spec.users:
        for c, label in enumerate(classes):
            center = spec.means[label] + spec.offsets.get(user, zero) + spec.class_offsets.get((user, label), zero)
            loc_names = [spec.locations[k % len(spec.locations)] for k in range(n)]
            noise = rng.normal(0.0, 1.0, (n, N_FEATURES)) * spec.spread
            X.append(center + noise + np.array([jitter[l] for l in loc_names]))
            y.extend([c] * n)
            users.extend([user] * n)
            locs.extend(loc_names)
    return Dataset(np.vstack(X), y, classes, users=users, locations=locs)


def gesture_spec(samples_per_class_user: int = 100, users=("u0",), separation: float = 8.0,
                 spread: float = 1.0, location_jitter: float = 0.0) -> SynthSpec:
    """Five gesture classes with centres ``separation * spread`` apart along distinct features."""
    base = np.zeros(N_FEATURES)
    means = {}
    for c, label in enumerate(DEFAULT_GESTURES):
        m = base.copy()
        m[c] = separation * spread
        means[label] = m
    return SynthSpec(means, np.full(N_FEATURES, spread), list(users), ["l0", "l1", "l2"],
                     samples_per_class_user, location_jitter=location_jitter)
