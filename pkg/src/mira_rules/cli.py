"""Command-line entry point: ``mira {train,evaluate,predict,personalize,inspect,synth,split}``.

Exit codes: 0 success, 1 runtime/validation failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import rulefile
from .core import FeatureVector, InductionConfig, MiraError
from .data import load_samples_csv, parse_synth_spec, split, synthesize, write_samples_csv
from .induction import induce_ruleset
from .inference import evaluate, explain, format_explanation, predict
from .personalization import personalize


def _config(path) -> InductionConfig:
    return rulefile.load_config(path) if path else InductionConfig()


def _write_json(obj, path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def cmd_train(args) -> int:
    cfg = _config(args.config)
    train = load_samples_csv(args.train)
    val = load_samples_csv(args.val, alphabet=train.alphabet)
    rs, trace = induce_ruleset(train, val, cfg)
    rulefile.save(rs, args.out)
    if args.trace:
        _write_json(trace.to_dict(), args.trace)
    n_lits = [len(r.literals) for r in rs.body]
    print(f"rules: {len(rs.body)} (+1 default)")
    print(f"literals per rule: {n_lits}")
    print(f"stop: {trace.stop_reason}")
    print(f"train accuracy: {evaluate(rs, train).accuracy:.4f}")
    print(f"val accuracy: {evaluate(rs, val).accuracy:.4f}")
    return 0


def cmd_evaluate(args) -> int:
    rs = rulefile.load(args.rules)
    ds = load_samples_csv(args.data, alphabet=rs.alphabet)
    report = evaluate(rs, ds)
    print(report.format())
    if args.report:
        _write_json(report.to_dict(), args.report)
    return 0


def cmd_predict(args) -> int:
    rs = rulefile.load(args.rules)
    ds = load_samples_csv(args.data, alphabet=rs.alphabet)
    for i in range(len(ds)):
        x = FeatureVector.from_array(ds.X[i])
        p = predict(rs, x)
        print(f"{i}\t{p.label}\t{p.fired_rule_index}")
        if args.explain:
            print(format_explanation(explain(rs, x)))
    return 0


def cmd_personalize(args) -> int:
    rs = rulefile.load(args.rules)
    cfg = rulefile.load_config(args.config) if args.config else rs.config
    calib = load_samples_csv(args.calibration, alphabet=rs.alphabet)
    out = personalize(rs, calib, cfg)
    rulefile.save(out, args.out)
    n_new = sum(r.kind == "personalized" for r in out.rules) - sum(r.kind == "personalized" for r in rs.rules)
    print(f"personalized rules added: {n_new}")
    print(f"calibration accuracy: {evaluate(rs, calib).accuracy:.4f} -> {evaluate(out, calib).accuracy:.4f}")
    return 0


def cmd_inspect(args) -> int:
    print(rulefile.pretty(rulefile.load(args.rules)))
    return 0


def cmd_synth(args) -> int:
    spec = parse_synth_spec(Path(args.spec).read_text(encoding="utf-8"))
    ds = synthesize(spec, args.seed)
    write_samples_csv(ds, args.out)
    print(f"wrote {len(ds)} samples to {args.out}")
    return 0


def cmd_split(args) -> int:
    ds = load_samples_csv(args.data)
    if args.users:
        groups = [[u for u in g.split(",") if u] for g in args.users]
        parts = split(ds, {"by_users": groups})
    else:
        train_frac, val_frac, test_frac = args.fractions
        parts = split(ds, {"train_frac": train_frac, "val_frac": val_frac, "test_frac": test_frac}, args.seed)
    for part, path in zip(parts, args.out):
        write_samples_csv(part, path)
        print(f"wrote {len(part)} samples to {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mira", description="Interpretable multi-class rule induction.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="induce a rule set")
    p.add_argument("--train", required=True)
    p.add_argument("--val", required=True)
    p.add_argument("--config")
    p.add_argument("--out", required=True)
    p.add_argument("--trace")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="accuracy, confusion matrix and per-rule firing counts")
    p.add_argument("--rules", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--report")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("predict", help="predict each sample of a CSV")
    p.add_argument("--rules", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--explain", action="store_true")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("personalize", help="append rules learned from calibration gestures")
    p.add_argument("--rules", required=True)
    p.add_argument("--calibration", required=True)
    p.add_argument("--config")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_personalize)

    p = sub.add_parser("inspect", help="pretty-print a rule file")
    p.add_argument("--rules", required=True)
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("synth", help="generate a synthetic samples CSV")
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("split", help="split a samples CSV into train/val/test")
    p.add_argument("--data", required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--fractions", type=float, nargs=3, metavar=("TRAIN", "VAL", "TEST"))
    g.add_argument("--users", nargs=3, metavar=("TRAIN_USERS", "VAL_USERS", "TEST_USERS"),
                   help="comma-separated user ids per partition")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", nargs=3, required=True, metavar=("TRAIN", "VAL", "TEST"))
    p.set_defaults(func=cmd_split)
    return parser


_PATH_ARGS = ("train", "val", "config", "out", "trace", "rules", "data", "report", "calibration", "spec")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for name in _PATH_ARGS:
        value = getattr(args, name, None)
        if value == "" or (isinstance(value, list) and "" in value):
            parser.error(f"--{name} must not be empty")
    try:
        return args.func(args)
    except BrokenPipeError:
        # output piped into e.g. ``head``; not an error
        sys.stdout = None
        return 0
    except (MiraError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
