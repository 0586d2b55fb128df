"""Robust permutation variable importance.

Prediction errors on the validation set are trimmed before scoring:
observations whose error deviates from the error median by at least 3
robust MADs are dropped, so a contaminated validation set cannot
distort the importance ranking.  Each feature's score is the increase
in trimmed RMSE after shuffling that feature's column, evaluated over
the same trimmed index set as the unpermuted fit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MAD_SCALE = 1.438  # consistency constant applied to the raw MAD


def robust_mad(values, scale: float = MAD_SCALE) -> float:
    """Scaled median absolute deviation from the median."""
    v = np.asarray(values, dtype=np.float64)
    if v.size == 0:
        raise ValueError("robust_mad of an empty vector")
    if not np.all(np.isfinite(v)):
        raise ValueError("robust_mad requires finite values")
    med = np.median(v)
    return float(scale * np.median(np.abs(v - med)))


def trim_validation(predictions, y, mad_scale: float = MAD_SCALE) -> np.ndarray:
    """Indices of observations surviving the 3-MAD error trim.

    Keeps i with |e_i - median(e)| < 3 * robust_mad(e) where
    e = predictions - y.  A zero MAD (at least half the errors
    identical) keeps every index.
    """
    pred = np.asarray(predictions, dtype=np.float64)
    resp = np.asarray(y, dtype=np.float64)
    if pred.shape != resp.shape:
        raise ValueError("predictions and y must have equal length")
    err = pred - resp
    center = np.median(err)
    spread = robust_mad(err, mad_scale)
    if spread == 0.0:
        return np.arange(err.shape[0])
    return np.nonzero(np.abs(err - center) < 3.0 * spread)[0]


@dataclass
class ImportanceReport:
    """Per-feature importance scores plus the trim bookkeeping."""

    scores: np.ndarray
    n_used: int  # validation rows surviving the trim
    seed: int
    feature_names: list = field(default_factory=list)

    def ranking(self):
        """Feature indices ordered by decreasing score."""
        order = np.argsort(-self.scores, kind="stable")
        return order


def _trimmed_rmse(err, kept):
    e = err[kept]
    return float(np.sqrt(np.mean(e * e)))


def permutation_importance(model, val, seed: int, repeats: int = 1,
                           mad_scale: float = MAD_SCALE) -> ImportanceReport:
    """Score every feature of a fitted model on a validation set.

    The trimmed index set is computed once from the unpermuted
    predictions; each feature column is then shuffled with its own
    seeded stream (reproducible in isolation and independent of the
    total feature count) and the trimmed RMSE difference recorded.
    Only trees that actually reference the shuffled feature are
    re-evaluated, so untouched features score exactly zero.
    """
    X = np.array(val.X, dtype=np.float64, copy=True)
    y = np.asarray(val.y, dtype=np.float64)
    n, p = X.shape
    base = model.predict(X)
    kept = trim_validation(base, y, mad_scale)
    if kept.size == 0:
        raise ValueError("every validation observation was trimmed")
    base_err = base - y
    base_score = _trimmed_rmse(base_err, kept)

    by_feature = {}
    for coef, tree in model.iter_components():
        for j in tree.features_used():
            by_feature.setdefault(j, []).append((coef, tree))

    scores = np.zeros(p)
    col_backup = np.empty(n)
    for j in range(p):
        users = by_feature.get(j)
        if not users:
            continue
        acc = 0.0
        for rep in range(repeats):
            rng = np.random.default_rng([seed, j, rep])
            col_backup[:] = X[:, j]
            X[:, j] = rng.permutation(X[:, j])
            delta = np.zeros(n)
            for coef, tree in users:
                delta += coef * tree.predict(X, validate=False)
            X[:, j] = col_backup
            for coef, tree in users:
                delta -= coef * tree.predict(X, validate=False)
            perm_err = base_err + delta
            acc += _trimmed_rmse(perm_err, kept) - base_score
        scores[j] = acc / repeats

    names = list(getattr(val, "feature_names", []) or [])
    return ImportanceReport(scores=scores, n_used=int(kept.size), seed=seed,
                            feature_names=names)


def recovery_fraction(report: ImportanceReport, true_set) -> float:
    """Fraction of the generating features ranked inside the top |M|.

    A feature counts as recovered when its score is >= the |M|-th
    largest score, so exact ties at the cutoff are counted inclusively.
    """
    true_idx = np.asarray(sorted(true_set), dtype=int)
    m = true_idx.size
    if m == 0:
        raise ValueError("true_set must be non-empty")
    if m > report.scores.size:
        raise ValueError("true_set larger than the number of features")
    cutoff = np.sort(report.scores)[::-1][m - 1]
    hits = int(np.count_nonzero(report.scores[true_idx] >= cutoff))
    return hits / m
