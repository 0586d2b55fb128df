"""Command-line interface.

Subcommands: train, predict, importance, simulate, benchmark.
Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import asdict

import numpy as np

from .baselines import METHODS as BASELINE_METHODS
from .data import Dataset, load_csv, load_feature_csv, save_csv
from .errors import DataError, NumericalError
from .harness import (ALL_METHODS, DEFAULT_ERRORS, PRESETS, error_label,
                      parse_error_spec, run_benchmark, train_method,
                      write_manifest, write_results_csv)
from .importance import permutation_importance
from .losses import LossSpec
from .modelfile import load_model, save_model
from .simgen import SimSetting, gen_errors, make_setting

CLI_METHODS = ("rrboost", "sboost") + BASELINE_METHODS


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage problems exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _gamma_arg(text):
    value = float(text)
    if not 0.0 < value <= 1.0:
        raise argparse.ArgumentTypeError("gamma must lie in (0, 1]")
    return value


def _positive_int(text):
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser():
    parser = _Parser(prog="robustboost",
                     description="Robust gradient boosting for regression")
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="fit a model from CSV data")
    p_train.add_argument("--train", required=True, help="training CSV")
    p_train.add_argument("--val", required=True, help="validation CSV")
    p_train.add_argument("--target", default=None,
                         help="response column (default: last column)")
    p_train.add_argument("--method", choices=CLI_METHODS, default="rrboost")
    p_train.add_argument("--depth", type=_positive_int, default=1)
    p_train.add_argument("--min-node", type=_positive_int, default=10)
    p_train.add_argument("--t1-max", type=int, default=None)
    p_train.add_argument("--t2-max", type=int, default=None)
    p_train.add_argument("--t-max", type=int, default=None)
    p_train.add_argument("--gamma", type=_gamma_arg, default=1.0)
    p_train.add_argument("--seed", type=int, default=0)
    p_train.add_argument("--plateau-patience", type=int, default=25,
                         help="stage-2 zero-step cutoff; 0 disables")
    p_train.add_argument("--contaminate", default=None, metavar="SPEC",
                         help="add synthetic errors to train/val responses, "
                              "e.g. D2:0.2 or D4")
    p_train.add_argument("--snr", type=float, default=6.0,
                         help="signal-to-noise ratio for --contaminate")
    p_train.add_argument("--out", default="model.json")

    p_pred = sub.add_parser("predict", help="predict with a saved model")
    p_pred.add_argument("--model", required=True)
    p_pred.add_argument("--data", required=True)
    p_pred.add_argument("--target", default=None,
                        help="response column to ignore if present")
    p_pred.add_argument("--out", default="predictions.csv")

    p_imp = sub.add_parser("importance",
                           help="robust permutation importance scores")
    p_imp.add_argument("--model", required=True)
    p_imp.add_argument("--data", required=True, help="validation CSV")
    p_imp.add_argument("--target", default=None)
    p_imp.add_argument("--seed", type=int, default=0)
    p_imp.add_argument("--repeats", type=_positive_int, default=1)
    p_imp.add_argument("--out", default="importance.csv")

    p_sim = sub.add_parser("simulate", help="write synthetic data splits")
    _add_setting_flags(p_sim)
    p_sim.add_argument("--error", default="D0", metavar="SPEC",
                       help="error model, e.g. D0, D2:0.2, D4")
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--out-prefix", default="sim")

    p_bench = sub.add_parser("benchmark",
                             help="replicate the simulation study grid")
    _add_setting_flags(p_bench)
    p_bench.add_argument("--methods", default=",".join(ALL_METHODS),
                         help="comma-separated subset of: " + ",".join(ALL_METHODS))
    p_bench.add_argument("--errors", default=None,
                         help="comma-separated error specs, e.g. D0,D2:0.2,D4 "
                              "(default: the full grid)")
    p_bench.add_argument("--reps", type=_positive_int, default=10)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--jobs", type=_positive_int, default=1)
    p_bench.add_argument("--min-node", type=_positive_int, default=10)
    p_bench.add_argument("--t1-max", type=int, default=None)
    p_bench.add_argument("--t2-max", type=int, default=None)
    p_bench.add_argument("--t-max", type=int, default=None)
    p_bench.add_argument("--gamma", type=_gamma_arg, default=1.0)
    p_bench.add_argument("--out", default="results.csv")
    return parser


def _add_setting_flags(sub_parser):
    sub_parser.add_argument("--setting", choices=("1", "2", "3", "custom"),
                            default="1")
    sub_parser.add_argument("--g", choices=("g1", "g2", "g3"), default="g1")
    sub_parser.add_argument("--corr", choices=("S0", "S1", "S2"), default="S0")
    sub_parser.add_argument("--n-train", type=_positive_int, default=300)
    sub_parser.add_argument("--n-val", type=_positive_int, default=200)
    sub_parser.add_argument("--n-test", type=_positive_int, default=1000)
    sub_parser.add_argument("--p", type=_positive_int, default=10)
    sub_parser.add_argument("--snr", type=float, default=6.0)
    sub_parser.add_argument("--depth", type=_positive_int, default=None)


def _resolve_setting(args):
    if args.setting == "custom":
        setting = SimSetting(g=args.g, corr=args.corr, n_train=args.n_train,
                             n_val=args.n_val, n_test=args.n_test, p=args.p,
                             snr=args.snr)
        depth = args.depth or 1
    else:
        setting, depth = PRESETS[args.setting]
        if args.depth is not None:
            depth = args.depth
    return setting, depth


def _contaminate(train: Dataset, val: Dataset, spec: str, snr: float, seed: int):
    kind, alpha = parse_error_spec(spec)
    root = np.random.SeedSequence((seed, 9001))
    train_ss, val_ss = root.spawn(2)
    # the clean signal variance is unknown for real data; the response
    # variance is the usable stand-in, and the error scale is nominal
    # unit as in the synthetic generator
    amplitude = float(np.sqrt(np.var(train.y) / snr))
    train.y = train.y + amplitude * gen_errors(
        kind, alpha, train.n, np.random.default_rng(train_ss))
    val.y = val.y + amplitude * gen_errors(
        kind, alpha, val.n, np.random.default_rng(val_ss))
    return amplitude


def cmd_train(args) -> int:
    train = load_csv(args.train, args.target).validate_finite()
    val = load_csv(args.val, args.target).validate_finite()
    if train.feature_names != val.feature_names:
        raise DataError("train and validation files disagree on feature columns")
    if args.contaminate:
        _contaminate(train, val, args.contaminate, args.snr, args.seed)
    plateau = args.plateau_patience if args.plateau_patience > 0 else None
    started = time.perf_counter()
    model, trace = train_method(args.method, train, val, depth=args.depth,
                                min_node=args.min_node, gamma=args.gamma,
                                t1_max=args.t1_max, t2_max=args.t2_max,
                                t_max=args.t_max, plateau_patience=plateau)
    elapsed = time.perf_counter() - started
    manifest = {
        "seed": args.seed,
        "depth": args.depth,
        "min_node": args.min_node,
        "gamma": args.gamma,
        "t1_max": args.t1_max,
        "t2_max": args.t2_max,
        "t_max": args.t_max,
        "contaminate": args.contaminate,
        "feature_names": train.feature_names,
        "target": train.target_name,
    }
    stage1 = LossSpec("tukey", c=1.547, kappa=0.5)
    stage2 = LossSpec("tukey", c=4.685, kappa=0.5)
    # adaptive-Huber methods re-tune their constant every iteration, so
    # no fixed loss spec describes them; the manifest carries the rule
    loss_by_method = {
        "rrboost": (stage1, stage2),
        "sboost": (stage1, None),
        "l2": (LossSpec("square"), None),
        "lad": (LossSpec("absolute"), None),
        "mboost": (None, None),
        "robloss": (None, None),
    }
    if args.method == "mboost":
        manifest["adaptive_huber_tuning"] = "quantile90"
    elif args.method == "robloss":
        manifest["adaptive_huber_tuning"] = "mad"
    loss1, loss2 = loss_by_method[args.method]
    save_model(args.out, model, args.method, loss1, loss2, manifest)
    stop = model.stop_index
    final_train = trace.train_loss[stop - 1] if stop >= 1 else float("nan")
    final_val = trace.val_loss[stop - 1] if stop >= 1 else float("nan")
    print(f"method: {args.method}")
    print(f"stop_index: {stop}  stage_boundary: {model.stage_boundary}  "
          f"iterations_run: {len(model.steps)}")
    print(f"train_loss_at_stop: {final_train!r}")
    print(f"val_loss_at_stop: {final_val!r}")
    print(f"sigma_hat: {model.sigma_hat!r}")
    print(f"termination: {trace.termination}")
    print(f"seconds: {elapsed:.3f}")
    print(f"model: {args.out}")
    return 0


def cmd_predict(args) -> int:
    model, rec = load_model(args.model)
    manifest = rec.get("manifest", {})
    X = load_feature_csv(args.data, manifest.get("feature_names"),
                         target=args.target or manifest.get("target"))
    if not np.all(np.isfinite(X)):
        raise DataError("prediction input contains non-finite values")
    preds = model.predict(X)
    with open(args.out, "w") as fh:
        fh.write("prediction\n")
        for v in preds:
            fh.write(repr(float(v)) + "\n")
    print(f"wrote {len(preds)} predictions to {args.out}")
    return 0


def cmd_importance(args) -> int:
    model, rec = load_model(args.model)
    manifest = rec.get("manifest", {})
    data = load_csv(args.data, args.target or manifest.get("target"))
    expected = manifest.get("feature_names")
    if expected is not None and list(data.feature_names) != list(expected):
        offenders = ([n for n in data.feature_names if n not in expected]
                     + [n for n in expected if n not in data.feature_names])
        raise DataError(
            f"feature columns do not match the training manifest "
            f"(first mismatch: {offenders[0]!r})"
        )
    data.validate_finite()
    report = permutation_importance(model, data, seed=args.seed,
                                    repeats=args.repeats)
    order = report.ranking()
    with open(args.out, "w") as fh:
        fh.write("feature,importance\n")
        for j in order:
            fh.write(f"{data.feature_names[j]},{report.scores[j]!r}\n")
    print(f"wrote importance scores for {len(order)} features to {args.out}")
    return 0


def cmd_simulate(args) -> int:
    setting, _ = _resolve_setting(args)
    kind, alpha = parse_error_spec(args.error)
    setting = SimSetting(**{**asdict(setting), "noise": kind, "alpha": alpha,
                            "seed": args.seed})
    train, val, test, amplitude = make_setting(setting, return_amplitude=True)
    paths = {}
    for name, ds in (("train", train), ("val", val), ("test", test)):
        path = f"{args.out_prefix}_{name}.csv"
        save_csv(path, ds)
        paths[name] = path
    manifest = {"setting": asdict(setting), "error_amplitude": amplitude,
                "files": paths}
    write_manifest(f"{args.out_prefix}_manifest.json", manifest)
    print(f"wrote {paths['train']}, {paths['val']}, {paths['test']} "
          f"(C={amplitude:.6g})")
    return 0


def cmd_benchmark(args) -> int:
    setting, depth = _resolve_setting(args)
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    for m in methods:
        if m not in ALL_METHODS:
            raise DataError(f"unknown method {m!r}")
    if args.errors:
        errors = [parse_error_spec(tok) for tok in args.errors.split(",")]
    else:
        errors = list(DEFAULT_ERRORS)
    overrides = {"gamma": args.gamma}
    if args.t1_max is not None:
        overrides["t1_max"] = args.t1_max
    if args.t2_max is not None:
        overrides["t2_max"] = args.t2_max
    if args.t_max is not None:
        overrides["t_max"] = args.t_max
    started = time.perf_counter()
    rows, manifest = run_benchmark(setting, depth, methods, errors,
                                   reps=args.reps, seed=args.seed,
                                   jobs=args.jobs, min_node=args.min_node,
                                   overrides=overrides)
    manifest["seconds"] = round(time.perf_counter() - started, 3)
    write_results_csv(args.out, rows)
    manifest_path = args.out.rsplit(".", 1)[0] + "_manifest.json"
    write_manifest(manifest_path, manifest)
    for row in rows:
        print(f"{row['error']:>9} {row['method']:>8}  "
              f"rmse {row['rmse_mean']:.4g} ({row['rmse_sd']:.3g})  "
              f"recovery {row['recovery_mean']:.3g}  "
              f"failed {row['n_failed']}")
    print(f"results: {args.out}  manifest: {manifest_path}")
    return 0


_COMMANDS = {
    "train": cmd_train,
    "predict": cmd_predict,
    "importance": cmd_importance,
    "simulate": cmd_simulate,
    "benchmark": cmd_benchmark,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
