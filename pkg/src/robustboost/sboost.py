"""Stage 1: gradient boosting that minimizes the residual M-scale.

Each iteration solves the scale equation on the current training
residuals, fits a least-squares tree to the negative scale gradient,
line-searches the step size against the re-solved scale itself, and
records the validation scale for early stopping.  Because the scale is
the objective (rather than an auxiliary estimate recomputed under a
changing loss), observations with gross residuals contribute exactly
zero gradient and cannot steer the fit.
"""

from __future__ import annotations

import numpy as np

from .boosting import (BoostConfig, Ensemble, FitTrace, MemoObjective,
                       argmin_stop, fit_negative_gradient, line_search)
from .errors import AllOutlyingError, DegenerateScaleError, NoRootError
from .mscale import mscale_gradient, solve_mscale
from .trees import ColumnOrder, Tree


def sboost_train(train, val, init: Tree, config: BoostConfig,
                 column_order: ColumnOrder | None = None):
    """Run the scale-minimizing stage.

    Returns (ensemble, scale_solution, trace): the ensemble keeps every
    step but truncates prediction at the validation-scale argmin, and
    the scale solution is re-solved on the training residuals at that
    stopping point.

    The loop terminates early (with the trace so far) when the scale
    gradient becomes undefined because every observation left the
    descending region of the loss, or when the training residuals
    collapse (interpolation).  A degenerate fit *at the stopping point*
    raises, since no positive residual scale exists there.
    """
    X, y = train.X, train.y
    Xv, yv = val.X, val.y
    rho0 = config.rho0
    if column_order is None:
        column_order = ColumnOrder(X)

    r0 = y - init.predict(X, validate=False)
    rv = yv - init.predict(Xv, validate=False)
    sigma_cur = solve_mscale(r0, rho0, tol=config.scale_tol).sigma

    r = r0.copy()
    steps = []
    contribs = []
    train_trace = []
    val_trace = []
    sigma_val_hint = None
    termination = "completed"

    for _ in range(config.t1_max):
        try:
            g = mscale_gradient(r, sigma_cur, rho0)
        except AllOutlyingError:
            termination = "all_outlying"
            break
        h = fit_negative_gradient(X, g, config.depth, config.min_node,
                                  column_order, config.stage1_min_gain)
        hx = h.predict(X, validate=False)
        hv = h.predict(Xv, validate=False)

        def objective(a, _r=r, _hx=hx, _hint=sigma_cur):
            try:
                return solve_mscale(_r - a * _hx, rho0, tol=config.scale_tol,
                                    bracket_hint=_hint).sigma
            except (DegenerateScaleError, NoRootError):
                return 0.0  # the step interpolates; scale tends to zero

        memo = MemoObjective(objective, known={0.0: sigma_cur})
        alpha = line_search(memo, bracket_hint=1.0)
        step = config.gamma * alpha
        r = r - step * hx
        rv = rv - step * hv
        steps.append((alpha, h))
        contribs.append(step * hx)

        cached = memo.cache.get(alpha) if config.gamma == 1.0 else None
        if cached is not None and cached > 0.0:
            sigma_cur = cached
        else:
            try:
                sigma_cur = solve_mscale(r, rho0, tol=config.scale_tol,
                                         bracket_hint=sigma_cur).sigma
            except (DegenerateScaleError, NoRootError):
                train_trace.append(0.0)
                val_trace.append(_val_scale(rv, rho0, config.scale_tol,
                                            sigma_val_hint))
                termination = "interpolation"
                break
        train_trace.append(sigma_cur)
        sv = _val_scale(rv, rho0, config.scale_tol, sigma_val_hint)
        if np.isfinite(sv):
            sigma_val_hint = sv
        val_trace.append(sv)

    if steps:
        t1_stop = argmin_stop(val_trace) + 1
    else:
        t1_stop = 0

    r_stop = r0 - sum(contribs[:t1_stop]) if t1_stop else r0
    solution = solve_mscale(r_stop, rho0, tol=config.scale_tol)

    ensemble = Ensemble(init=init, steps=steps, gamma=config.gamma,
                        sigma_hat=solution.sigma,
                        stage_boundary=len(steps), stop_index=t1_stop)
    trace = FitTrace(np.asarray(train_trace), np.asarray(val_trace),
                     np.ones(len(train_trace), dtype=np.int8),
                     termination=termination)
    return ensemble, solution, trace


def _val_scale(rv, rho0, tol, hint):
    # a failed validation solve records +inf so the argmin skips it
    try:
        return solve_mscale(rv, rho0, tol=tol, bracket_hint=hint).sigma
    except (DegenerateScaleError, NoRootError):
        return float("inf")
