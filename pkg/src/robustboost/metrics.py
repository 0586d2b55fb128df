"""Evaluation metrics."""

from __future__ import annotations

import numpy as np

from .importance import MAD_SCALE, trim_validation


def rmse(predictions, y) -> float:
    """Root-mean-square prediction error."""
    p = np.asarray(predictions, dtype=np.float64)
    t = np.asarray(y, dtype=np.float64)
    if p.shape != t.shape or p.size == 0:
        raise ValueError("predictions and y must be equal-length, non-empty")
    e = p - t
    return float(np.sqrt(np.mean(e * e)))


def trmse(predictions, y, mad_scale: float = MAD_SCALE) -> float:
    """RMSE over the observations surviving the 3-MAD error trim."""
    kept = trim_validation(predictions, y, mad_scale)
    if kept.size == 0:
        raise ValueError("every observation was trimmed")
    p = np.asarray(predictions, dtype=np.float64)[kept]
    t = np.asarray(y, dtype=np.float64)[kept]
    e = p - t
    return float(np.sqrt(np.mean(e * e)))


def summarize(values) -> tuple:
    """(mean, sample standard deviation) across replications."""
    v = np.asarray(values, dtype=np.float64)
    if v.size < 2:
        raise ValueError("summarize needs at least two values")
    return float(np.mean(v)), float(np.std(v, ddof=1))
