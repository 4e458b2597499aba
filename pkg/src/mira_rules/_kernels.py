"""Hot inner loops, each with a numba and a pure-numpy implementation.

Set ``MIRA_DISABLE_NUMBA=1`` to force the numpy path (also used when numba
is not importable). Both paths are exercised by the test-suite and compared
in ``benchmarks/bench_kernels.py``.
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

_DISABLE = os.environ.get("MIRA_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")
USE_NUMBA = numba is not None and not _DISABLE

_JIT_OPTIONS = {"nopython": True, "nogil": True, "cache": True, "fastmath": False}

# rows per block in the numpy distance path; bounds peak memory at block * n * 5 doubles
_BLOCK = 256


def _distance_sums_numpy(X: np.ndarray, codes: np.ndarray, n_classes: int) -> np.ndarray:
    n = X.shape[0]
    onehot = np.zeros((n, n_classes))
    onehot[np.arange(n), codes] = 1.0
    out = np.empty((n, n_classes))
    for lo in range(0, n, _BLOCK):
        diff = X[lo:lo + _BLOCK, None, :] - X[None, :, :]
        d = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
        out[lo:lo + _BLOCK] = d @ onehot
    return out


def _threshold_scan_numpy(values, pos, neg):
    # values sorted ascending; pos/neg are 0/1 weights in the same order
    cum_pos = np.cumsum(pos)
    cum_neg = np.cumsum(neg)
    cut = np.flatnonzero(values[:-1] < values[1:])
    lo = values[cut]
    hi = values[cut + 1]
    mid = lo + (hi - lo) / 2.0
    # adjacent doubles have no midpoint; the lower value then splits identically
    mid = np.where(mid < hi, mid, lo)
    return mid, cum_pos[cut], cum_neg[cut]


if numba is not None:

    @numba.jit(**_JIT_OPTIONS)
    def _distance_sums_numba(X, codes, n_classes):
        n, m = X.shape
        out = np.zeros((n, n_classes))
        for i in range(n):
            ci = codes[i]
            for k in range(i + 1, n):
                s = 0.0
                for f in range(m):
                    t = X[i, f] - X[k, f]
                    s += t * t
                d = np.sqrt(s)
                out[i, codes[k]] += d
                out[k, ci] += d
        return out

    @numba.jit(**_JIT_OPTIONS)
    def _threshold_scan_numba(values, pos, neg):
        n = values.shape[0]
        mids = np.empty(max(n - 1, 0))
        tp = np.empty(max(n - 1, 0), dtype=np.int64)
        fp = np.empty(max(n - 1, 0), dtype=np.int64)
        cp = 0
        cn = 0
        k = 0
        for i in range(n - 1):
            cp += pos[i]
            cn += neg[i]
            lo = values[i]
            hi = values[i + 1]
            if lo < hi:
                mid = lo + (hi - lo) / 2.0
                mids[k] = mid if mid < hi else lo
                tp[k] = cp
                fp[k] = cn
                k += 1
        return mids[:k], tp[:k], fp[:k]

else:  # pragma: no cover
    _distance_sums_numba = None
    _threshold_scan_numba = None


def class_distance_sums(X: np.ndarray, codes: np.ndarray, n_classes: int, use_numba: bool | None = None) -> np.ndarray:
    """``out[i, c]`` = sum of Euclidean distances from row ``i`` to all rows of class ``c``."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    codes = np.ascontiguousarray(codes, dtype=np.int64)
    if USE_NUMBA if use_numba is None else use_numba:
        return _distance_sums_numba(X, codes, n_classes)
    return _distance_sums_numpy(X, codes, n_classes)


def threshold_scan(values: np.ndarray, pos: np.ndarray, neg: np.ndarray, use_numba: bool | None = None):
    """Scan split points of a sorted column.

    Returns ``(thresholds, pos_le, neg_le)``: one entry per gap between
    consecutive distinct values, with the counts of ``pos``/``neg`` weights at
    or below the threshold.
    """
    values = np.ascontiguousarray(values, dtype=np.float64)
    pos = np.ascontiguousarray(pos, dtype=np.int64)
    neg = np.ascontiguousarray(neg, dtype=np.int64)
    if values.shape[0] < 2:
        return np.empty(0), np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)
    if USE_NUMBA if use_numba is None else use_numba:
        return _threshold_scan_numba(values, pos, neg)
    return _threshold_scan_numpy(values, pos, neg)
