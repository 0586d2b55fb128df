"""Reference boosters: squared-error, absolute-error, and two
adaptive-Huber variants that re-estimate their tuning constant from the
previous iteration's residuals (90% absolute-residual quantile for
"mboost", scaled MAD for "robloss").  The adaptive variants stop early
on the average absolute deviation of the validation residuals, since
their loss changes every iteration.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .boosting import Ensemble, FitTrace, MemoObjective, argmin_stop, line_search
from .importance import robust_mad
from .trees import ColumnOrder, fit_tree, leaf_tree

METHODS = ("l2", "lad", "mboost", "robloss")


@dataclass
class BaselineSpec:
    method: str
    t_max: int | None = None
    depth: int = 1
    min_node: int = 10
    gamma: float = 1.0
    min_gain: float = 0.0  # optional CART complexity gate for base learners

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown baseline method {self.method!r}")
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError("gamma must lie in (0, 1]")
        if self.t_max is None:
            self.t_max = 1500 if self.depth <= 1 else 800


def baseline_train(train, val, spec: BaselineSpec):
    """Fit one of the reference boosters with validation early stopping.

    The initializer is the response mean for "l2" and the median for
    the rest.  Per iteration the pseudo-response is the residual (l2),
    its sign (lad), or the residual clipped at the method's current
    Huber constant; the step size minimizes the method's own training
    loss.  A collapsed Huber constant (identical residuals) terminates
    as interpolation.
    """
    X, y = train.X, train.y
    Xv, yv = val.X, val.y
    method = spec.method
    if method == "l2":
        init = leaf_tree(float(np.mean(y)), "ls")
    else:
        init = leaf_tree(float(np.median(y)), "lad")
    column_order = ColumnOrder(X)

    r = y - init.value[0]
    rv = yv - init.value[0]
    n = y.shape[0]
    steps = []
    train_trace = []
    val_trace = []
    termination = "completed"
    sum_cur = None  # running objective, reusable only for a fixed loss

    for _ in range(spec.t_max):
        if method == "l2":
            target = r
            fam, c = _kernels.FAM_SQUARE, 0.0
        elif method == "lad":
            target = np.sign(r)
            fam, c = _kernels.FAM_ABSOLUTE, 0.0
        else:
            if method == "mboost":
                m = float(np.quantile(np.abs(r), 0.9))
            else:
                m = robust_mad(r)
            if m == 0.0:
                termination = "interpolation"
                break
            target = np.clip(r, -m, m)
            fam, c = _kernels.FAM_HUBER, m

        h = fit_tree(X, target, "ls", max_depth=spec.depth,
                     min_node=spec.min_node, column_order=column_order,
                     min_gain_frac=spec.min_gain)
        hx = h.predict(X, validate=False)
        hv = h.predict(Xv, validate=False)

        def objective(a, _r=r, _hx=hx, _fam=fam, _c=c):
            return _kernels.sum_rho_shifted(_r, _hx, a, 1.0, _fam, _c)

        known = {}
        if method in ("l2", "lad") and sum_cur is not None:
            known[0.0] = sum_cur
        memo = MemoObjective(objective, known=known)
        alpha = line_search(memo, bracket_hint=1.0)
        step = spec.gamma * alpha
        r = r - step * hx
        rv = rv - step * hv
        steps.append((alpha, h))

        if method in ("l2", "lad"):
            if spec.gamma == 1.0:
                sum_cur = memo.cache[alpha]
            else:
                sum_cur = _kernels.sum_rho(r, 1.0, fam, c)
            train_trace.append(sum_cur / n)
            if method == "l2":
                val_trace.append(float(np.mean(rv * rv)))
            else:
                val_trace.append(float(np.mean(np.abs(rv))))
        else:
            train_trace.append(float(np.mean(np.abs(r))))
            val_trace.append(float(np.mean(np.abs(rv))))  # validation AAD

    stop = argmin_stop(val_trace) + 1 if val_trace else 0
    ensemble = Ensemble(init=init, steps=steps, gamma=spec.gamma,
                        sigma_hat=None, stage_boundary=len(steps),
                        stop_index=stop)
    trace = FitTrace(np.asarray(train_trace), np.asarray(val_trace),
                     np.ones(len(train_trace), dtype=np.int8),
                     termination=termination)
    return ensemble, trace
