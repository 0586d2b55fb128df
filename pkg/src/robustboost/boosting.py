"""Shared boosting machinery: ensembles, traces, line search, stopping."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import LineSearchError
from .losses import TUKEY_C_EFFICIENT, TUKEY_C_HIGH_BREAKDOWN, LossSpec
from .trees import ColumnOrder, Tree, fit_tree

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass
class FitTrace:
    """Per-iteration training and validation losses plus stage labels."""

    train_loss: np.ndarray
    val_loss: np.ndarray
    stages: np.ndarray
    termination: str = "completed"

    @classmethod
    def concat(cls, first: "FitTrace", second: "FitTrace") -> "FitTrace":
        return cls(
            np.concatenate([first.train_loss, second.train_loss]),
            np.concatenate([first.val_loss, second.val_loss]),
            np.concatenate([first.stages, second.stages]),
            termination=second.termination if second.termination != "completed"
            else first.termination,
        )


@dataclass
class Ensemble:
    """An initial fit plus an ordered sequence of scaled tree steps.

    Prediction is init(x) + sum_{t < stop_index} gamma * alpha_t * h_t(x).
    ``stage_boundary`` separates first-stage steps from second-stage
    steps for two-stage fits; every step is retained for diagnostics and
    ``stop_index`` controls how many are used for prediction.
    """

    init: Tree
    steps: list = field(default_factory=list)  # (alpha, Tree) pairs
    gamma: float = 1.0
    sigma_hat: float | None = None
    stage_boundary: int = 0
    stop_index: int = 0

    def __post_init__(self):
        if not 0 <= self.stage_boundary <= len(self.steps):
            raise ValueError("stage_boundary out of range")
        if not 0 <= self.stop_index <= len(self.steps):
            raise ValueError("stop_index out of range")

    def iter_components(self, n_steps: int | None = None):
        """Yield (coefficient, tree) pairs of the truncated ensemble."""
        t = self.stop_index if n_steps is None else n_steps
        yield 1.0, self.init
        for alpha, tree in self.steps[:t]:
            yield self.gamma * alpha, tree

    def features_used(self):
        used = set()
        for _, tree in self.iter_components():
            used |= tree.features_used()
        return used

    def predict(self, X, n_steps: int | None = None, validate: bool = True):
        X = np.asarray(X, dtype=np.float64)
        if validate:
            used = sorted(self.features_used())
            if used:
                if X.ndim != 2 or X.shape[1] <= used[-1]:
                    raise ValueError("prediction input has too few columns")
                if not np.all(np.isfinite(X[:, used])):
                    raise ValueError("non-finite feature value in prediction input")
        out = None
        for coef, tree in self.iter_components(n_steps):
            part = coef * tree.predict(X, validate=False)
            out = part if out is None else out + part
        return out


@dataclass
class BoostConfig:
    """Settings shared by the two-stage robust fit.

    Iteration budgets default by tree depth: 500/1000 first/second
    stage iterations for stumps, 300/500 for deeper trees.

    ``stage1_min_gain`` is a CART complexity gate on the stage-1 base
    learners: a split must improve the gradient fit by that fraction of
    the target's root impurity.  The residual scale is not a prediction
    loss, so its validation trace cannot flag in-sample interpolation;
    the gate makes stage 1 stall once its gradients degenerate into
    noise, keeping the frozen scale handed to stage 2 honest.  Stage 2
    minimizes a genuine prediction loss whose validation trace catches
    overfitting, so its learners stay ungated by default.

    ``init_rel_margin`` is the practical-equivalence band of the
    initializer selection: the simplest candidate whose trimmed
    validation error is within that fraction of the best is chosen.
    Tree initializers deeper than the data demands carry split
    structure that additive base learners can never remove, so near-tied
    candidates resolve to the shallower one.
    """

    depth: int = 1
    min_node: int = 10
    gamma: float = 1.0
    t1_max: int | None = None
    t2_max: int | None = None
    rho0: LossSpec = LossSpec("tukey", c=TUKEY_C_HIGH_BREAKDOWN, kappa=0.5)
    rho1: LossSpec = LossSpec("tukey", c=TUKEY_C_EFFICIENT, kappa=0.5)
    init_depths: tuple = (0, 1, 2, 3, 4)
    init_min_nodes: tuple = (10, 20, 30)
    init_min_gain: float = 0.01
    init_rel_margin: float = 0.1
    stage1_min_gain: float = 0.01
    stage2_min_gain: float = 0.0
    scale_tol: float = 1e-12
    plateau_patience: int | None = 25

    def __post_init__(self):
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError("gamma must lie in (0, 1]")
        if self.depth < 0:
            raise ValueError("depth must be >= 0")
        if self.t1_max is None:
            self.t1_max = 500 if self.depth <= 1 else 300
        if self.t2_max is None:
            self.t2_max = 1000 if self.depth <= 1 else 500


class MemoObjective:
    """Callable wrapper caching objective evaluations by argument."""

    def __init__(self, fn, known: dict | None = None):
        self.fn = fn
        self.cache = dict(known) if known else {}

    def __call__(self, alpha: float) -> float:
        key = float(alpha)
        if key in self.cache:
            return self.cache[key]
        val = float(self.fn(key))
        if not math.isfinite(val):
            raise LineSearchError(
                f"objective evaluated to {val} at step size {key}"
            )
        self.cache[key] = val
        return val


def line_search(objective, bracket_hint: float = 1.0,
                max_doublings: int = 30, rel_tol: float = 1e-6) -> float:
    """Minimize a one-dimensional objective over non-negative steps.

    Doubles the bracket upper end from ``bracket_hint`` while the
    objective keeps decreasing there, then golden-section searches the
    bracket.  Returns the best probed point, so the result never
    exceeds objective(0); a monotone increasing objective yields 0.
    """
    f = objective if isinstance(objective, MemoObjective) else MemoObjective(objective)
    best_a = 0.0
    best_v = f(0.0)

    def consider(a, v):
        nonlocal best_a, best_v
        if v < best_v:
            best_a, best_v = a, v

    b = float(bracket_hint)
    fb = f(b)
    consider(b, fb)
    for _ in range(max_doublings):
        fb2 = f(2.0 * b)
        if not fb2 < fb:
            break
        b *= 2.0
        fb = fb2
        consider(b, fb)
    lo, hi = 0.0, 2.0 * b
    c = hi - _INVPHI * (hi - lo)
    d = lo + _INVPHI * (hi - lo)
    fc = f(c)
    fd = f(d)
    consider(c, fc)
    consider(d, fd)
    while (hi - lo) > rel_tol * max(1.0, abs(hi)):
        if fc < fd:
            hi = d
            d, fd = c, fc
            c = hi - _INVPHI * (hi - lo)
            fc = f(c)
            consider(c, fc)
        else:
            lo = c
            c, fc = d, fd
            d = lo + _INVPHI * (hi - lo)
            fd = f(d)
            consider(d, fd)
    return best_a


def argmin_stop(trace) -> int:
    """First index attaining the minimum of a loss trace (ties favor
    the earlier, simpler model)."""
    values = np.asarray(trace, dtype=np.float64)
    if values.size == 0:
        raise ValueError("empty loss trace")
    if np.any(np.isnan(values)):
        raise ValueError("loss trace contains NaN")
    return int(np.argmin(values))


def fit_negative_gradient(X, g, depth: int, min_node: int,
                          column_order: ColumnOrder | None = None,
                          min_gain_frac: float = 0.0) -> Tree:
    """Least-squares tree approximating the negative gradient vector."""
    g = np.asarray(g, dtype=np.float64)
    if not np.all(np.isfinite(g)):
        raise ValueError("gradient vector contains non-finite values")
    return fit_tree(X, -g, "ls", max_depth=depth, min_node=min_node,
                    column_order=column_order, min_gain_frac=min_gain_frac)
