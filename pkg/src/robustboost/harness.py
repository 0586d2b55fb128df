"""Benchmark harness: seeded replications over error models and methods.

Each replication generates its own train/validation/test triplet,
trains every requested method, and records the clean-sample test RMSE
at the stopping time together with the fraction of generating features
recovered by the robust importance ranking.  One summary row per
(error model, method) pair mirrors the layout of a results table.
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, replace

import numpy as np

from . import __version__, _kernels
from .baselines import BaselineSpec, baseline_train
from .boosting import BoostConfig
from .importance import permutation_importance, recovery_fraction
from .metrics import rmse
from .mstage import rrboost_train
from .sboost import sboost_train
from .simgen import ACTIVE_FEATURES, SimSetting
from .simgen import make_setting
from .trees import select_init_tree

ALL_METHODS = ("l2", "mboost", "lad", "robloss", "sboost", "rrboost")
DEFAULT_ERRORS = (("D0", 0.0), ("D1", 0.1), ("D1", 0.2), ("D2", 0.1),
                  ("D2", 0.2), ("D3", 0.0), ("D4", 0.0))

# the three reference experiment presets (template setting plus the
# base-learner depth that works best there)
PRESETS = {
    "1": (SimSetting(g="g1", corr="S0", n_train=300, n_val=200, p=10, snr=6.0), 1),
    "2": (SimSetting(g="g2", corr="S1", n_train=3000, n_val=2000, p=400, snr=10.0), 2),
    "3": (SimSetting(g="g3", corr="S2", n_train=300, n_val=200, p=400, snr=10.0), 1),
}


def error_label(kind: str, alpha: float) -> str:
    return f"{kind}({alpha * 100:g}%)" if kind in ("D1", "D2") else kind


def parse_error_spec(token: str):
    """Parse 'D0', 'D3', 'D4', or 'D1:0.2' / 'D2:0.1' style tokens."""
    part = token.strip()
    if ":" in part:
        kind, frac = part.split(":", 1)
        return kind, float(frac)
    if part in ("D1", "D2"):
        raise ValueError(f"{part} needs a contamination fraction, e.g. {part}:0.2")
    return part, 0.0


def train_method(method: str, train, val, depth: int, min_node: int = 10,
                 gamma: float = 1.0, t1_max: int | None = None,
                 t2_max: int | None = None, t_max: int | None = None,
                 plateau_patience: int | None = None):
    """Train one named method; returns (ensemble, trace)."""
    if method in ("rrboost", "sboost"):
        config = BoostConfig(depth=depth, min_node=min_node, gamma=gamma,
                             t1_max=t1_max, t2_max=t2_max,
                             plateau_patience=plateau_patience)
        if method == "rrboost":
            return rrboost_train(train, val, config)
        init, _ = select_init_tree(train, val, config.init_depths,
                                   config.init_min_nodes,
                                   min_gain_frac=config.init_min_gain,
                                   rel_margin=config.init_rel_margin)
        ensemble, _, trace = sboost_train(train, val, init, config)
        return ensemble, trace
    spec = BaselineSpec(method=method, t_max=t_max, depth=depth,
                        min_node=min_node, gamma=gamma)
    return baseline_train(train, val, spec)


def _derive_seed(*parts) -> int:
    return int(np.random.SeedSequence(tuple(parts)).generate_state(1)[0])


def _run_replication(args):
    (setting, methods, depth, min_node, overrides, rep_seed, imp_seed) = args
    data_setting = replace(setting, seed=rep_seed)
    train, val, test, amplitude = make_setting(data_setting, return_amplitude=True)
    true_set = ACTIVE_FEATURES[setting.g]
    out = {}
    for method in methods:
        try:
            model, _ = train_method(method, train, val, depth=depth,
                                    min_node=min_node, **overrides)
            test_rmse = rmse(model.predict(test.X), test.y)
            report = permutation_importance(model, val, seed=imp_seed)
            recovery = recovery_fraction(report, true_set)
            out[method] = {"rmse": test_rmse, "recovery": recovery,
                           "stop_index": model.stop_index}
        except Exception as exc:  # recorded, not fatal
            out[method] = {"error": f"{type(exc).__name__}: {exc}"}
    return amplitude, out


def run_benchmark(setting: SimSetting, depth: int, methods, errors, reps: int,
                  seed: int, jobs: int = 1, min_node: int = 10,
                  overrides: dict | None = None):
    """Run the full grid; returns (rows, manifest).

    rows is a list of dicts, one per (error model, method), in the
    given order.  Replication seeds derive from (seed, error index,
    replication index) so results do not depend on scheduling.
    """
    methods = tuple(methods)
    errors = tuple(errors)
    overrides = dict(overrides or {})
    tasks = []
    for ei, (kind, alpha) in enumerate(errors):
        err_setting = replace(setting, noise=kind, alpha=alpha)
        for rep in range(reps):
            tasks.append((
                (ei, rep),
                (err_setting, methods, depth, min_node, overrides,
                 _derive_seed(seed, ei, rep), _derive_seed(seed, ei, rep, 1)),
            ))

    results = {}
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for key, res in zip([k for k, _ in tasks],
                                pool.map(_run_replication, [a for _, a in tasks])):
                results[key] = res
    else:
        for key, args in tasks:
            results[key] = _run_replication(args)

    rows = []
    failures = []
    amplitudes = {}
    for ei, (kind, alpha) in enumerate(errors):
        label = error_label(kind, alpha)
        amplitudes[label] = [results[(ei, rep)][0] for rep in range(reps)]
        per_method = {m: {"rmse": [], "recovery": []} for m in methods}
        for rep in range(reps):
            _, rep_out = results[(ei, rep)]
            for m in methods:
                cell = rep_out[m]
                if "error" in cell:
                    failures.append({"error_model": label, "method": m,
                                     "replication": rep, "reason": cell["error"]})
                else:
                    per_method[m]["rmse"].append(cell["rmse"])
                    per_method[m]["recovery"].append(cell["recovery"])
        for m in methods:
            vals = per_method[m]
            n_ok = len(vals["rmse"])
            rows.append({
                "error": label,
                "method": m,
                "rmse_mean": _mean(vals["rmse"]),
                "rmse_sd": _sd(vals["rmse"]),
                "recovery_mean": _mean(vals["recovery"]),
                "recovery_sd": _sd(vals["recovery"]),
                "n_ok": n_ok,
                "n_failed": reps - n_ok,
            })

    manifest = {
        "package_version": __version__,
        "kernel_backend": _kernels.active_backend(),
        "setting": asdict(setting),
        "depth": depth,
        "min_node": min_node,
        "methods": list(methods),
        "errors": [error_label(k, a) for k, a in errors],
        "reps": reps,
        "seed": seed,
        "overrides": overrides,
        "amplitudes": amplitudes,
        "failures": failures,
    }
    return rows, manifest


def _mean(values):
    return float(np.mean(values)) if values else float("nan")


def _sd(values):
    return float(np.std(values, ddof=1)) if len(values) >= 2 else float("nan")


RESULT_COLUMNS = ("error", "method", "rmse_mean", "rmse_sd",
                  "recovery_mean", "recovery_sd", "n_ok", "n_failed")


def write_results_csv(path, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RESULT_COLUMNS)
        for row in rows:
            writer.writerow([
                row["error"], row["method"],
                repr(row["rmse_mean"]), repr(row["rmse_sd"]),
                repr(row["recovery_mean"]), repr(row["recovery_sd"]),
                row["n_ok"], row["n_failed"],
            ])


def write_manifest(path, manifest: dict):
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)
        fh.write("\n")
