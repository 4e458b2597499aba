"""Time the numba and numpy kernel paths, plus end-to-end induction.

    python3 benchmarks/bench_kernels.py [--sizes 500 2000 5000] [--repeat 5]

The end-to-end row is run in a subprocess per backend so that the
MIRA_DISABLE_NUMBA flag is honoured at import time.
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from mira_rules import _kernels

E2E = """
import time
from mira_rules.data import gesture_spec, split_fractions, synthesize
from mira_rules.induction import induce_ruleset
ds = synthesize(gesture_spec(samples_per_class_user={per}, separation=5.0), seed=1)
train, val, _ = split_fractions(ds, [5/7, 1/7, 1/7], seed=0)
induce_ruleset(train, val)
t0 = time.perf_counter()
induce_ruleset(train, val)
print(time.perf_counter() - t0)
"""


def best_of(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=[500, 2000, 5000])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if _kernels.numba is None:
        sys.exit("numba is not installed; nothing to compare")
    rng = np.random.default_rng(0)

    print(f"{'kernel':<22}{'n':>7}{'numba ms':>11}{'numpy ms':>11}{'speedup':>9}")
    for n in args.sizes:
        X = rng.normal(size=(n, 5))
        codes = rng.integers(0, 5, size=n)
        v = np.sort(rng.normal(size=n))
        pos = rng.random(n) < 0.3
        neg = ~pos
        cases = {
            "class_distance_sums": (lambda u: _kernels.class_distance_sums(X, codes, 5, use_numba=u)),
            "threshold_scan": (lambda u: _kernels.threshold_scan(v, pos, neg, use_numba=u)),
        }
        for name, fn in cases.items():
            fn(True)  # compile
            a, b = np.asarray(fn(True)[0]), np.asarray(fn(False)[0])
            assert np.allclose(a, b, rtol=1e-10, atol=1e-9), name
            t_nb = best_of(lambda: fn(True), args.repeat) * 1e3
            t_np = best_of(lambda: fn(False), args.repeat) * 1e3
            print(f"{name:<22}{n:>7}{t_nb:>11.3f}{t_np:>11.3f}{t_np / t_nb:>8.1f}x")

    print()
    print("end-to-end induce_ruleset, 5000 train / 1000 val (warm)")
    for label, env in (("numba", "0"), ("numpy", "1")):
        out = subprocess.run([sys.executable, "-c", E2E.format(per=1400)], capture_output=True, text=True,
                             env={**os.environ, "MIRA_DISABLE_NUMBA": env}, check=True)
        print(f"  {label:<6}{float(out.stdout.strip()):8.3f} s")


if __name__ == "__main__":
    main()
