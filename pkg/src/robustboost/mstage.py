"""Stage 2: bounded-loss boosting at a frozen residual scale.

Picks a robust tree initializer, runs the scale-minimizing stage, and
then refines the fit by gradient steps on a bounded loss whose scale
denominator stays fixed at the stage-1 estimate.  The frozen scale is
what keeps this efficiency-improving pass robust: re-estimating the
scale each iteration is exactly the failure mode of adaptive-Huber
boosting under heavy contamination.
"""

from __future__ import annotations

import numpy as np

from . import _kernels
from .boosting import (BoostConfig, Ensemble, FitTrace, MemoObjective,
                       argmin_stop, fit_negative_gradient, line_search)
from .losses import psi
from .mscale import solve_mscale
from .sboost import sboost_train
from .trees import ColumnOrder, select_init_tree


def shrinkage_step(alpha: float, gamma: float) -> float:
    """Effective update size of a shrunk boosting step."""
    if not 0.0 < gamma <= 1.0:
        raise ValueError("gamma must lie in (0, 1]")
    return gamma * alpha


def bounded_loss_gradient(residuals, sigma: float, rho1):
    """Gradient of sum_i rho1((y_i - F_i) / sigma) in the fitted values."""
    r = np.asarray(residuals, dtype=np.float64)
    return -psi(rho1, r / sigma) / sigma


def rrboost_train(train, val, config: BoostConfig):
    """Two-stage robust boosting fit.

    Returns (ensemble, trace).  The ensemble holds the stage-1 steps up
    to the stage-1 stopping point followed by every stage-2 step;
    ``stage_boundary`` marks the junction and ``stop_index`` adds the
    stage-2 validation argmin.  The stage-2 validation loss divides by
    the stage-1 *validation* scale at its stopping time, not by the
    training scale.
    """
    column_order = ColumnOrder(train.X)
    init, _ = select_init_tree(train, val, config.init_depths,
                               config.init_min_nodes,
                               min_gain_frac=config.init_min_gain,
                               rel_margin=config.init_rel_margin)
    s_ens, s_sol, s_trace = sboost_train(train, val, init, config,
                                         column_order=column_order)
    sigma = s_sol.sigma
    t1_stop = s_ens.stop_index

    X, y = train.X, train.y
    Xv, yv = val.X, val.y
    F = s_ens.predict(X, validate=False)
    Fv = s_ens.predict(Xv, validate=False)
    r = y - F
    rv = yv - Fv

    if t1_stop >= 1 and np.isfinite(s_trace.val_loss[t1_stop - 1]):
        sigma_val = float(s_trace.val_loss[t1_stop - 1])
    else:
        sigma_val = solve_mscale(rv, config.rho0, tol=config.scale_tol).sigma

    rho1 = config.rho1
    fam, c = rho1.code, rho1.c
    n = y.shape[0]
    n_val = yv.shape[0]

    steps = list(s_ens.steps[:t1_stop])
    train_trace = []
    val_trace = []
    termination = "completed"
    zero_streak = 0
    sum_cur = _kernels.sum_rho(r, sigma, fam, c)

    for _ in range(config.t2_max):
        g = bounded_loss_gradient(r, sigma, rho1)
        h = fit_negative_gradient(X, g, config.depth, config.min_node,
                                  column_order, config.stage2_min_gain)
        hx = h.predict(X, validate=False)
        hv = h.predict(Xv, validate=False)

        def objective(a, _r=r, _hx=hx):
            return _kernels.sum_rho_shifted(_r, _hx, a, sigma, fam, c)

        memo = MemoObjective(objective, known={0.0: sum_cur})
        alpha = line_search(memo, bracket_hint=1.0)
        step = config.gamma * alpha
        r = r - step * hx
        rv = rv - step * hv
        steps.append((alpha, h))

        if config.gamma == 1.0:
            sum_cur = memo.cache[alpha]
        else:
            sum_cur = _kernels.sum_rho(r, sigma, fam, c)
        train_trace.append(sum_cur / n)
        val_trace.append(_kernels.sum_rho(rv, sigma_val, fam, c) / n_val)

        if step == 0.0:
            zero_streak += 1
            if (config.plateau_patience is not None
                    and zero_streak >= config.plateau_patience):
                termination = "plateau"
                break
        else:
            zero_streak = 0

    t2_stop = argmin_stop(val_trace) + 1 if val_trace else 0
    ensemble = Ensemble(init=init, steps=steps, gamma=config.gamma,
                        sigma_hat=sigma, stage_boundary=t1_stop,
                        stop_index=t1_stop + t2_stop)
    stage2 = FitTrace(np.asarray(train_trace), np.asarray(val_trace),
                      np.full(len(train_trace), 2, dtype=np.int8),
                      termination=termination)
    return ensemble, FitTrace.concat(s_trace, stage2)
