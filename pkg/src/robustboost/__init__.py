"""Robust gradient boosting for regression.

A two-stage tree-boosting estimator for data whose training and
validation sets may contain outliers: stage 1 boosts directly on an
M-estimate of the residual scale from a robust tree initializer, and
stage 2 sharpens the fit with a bounded loss at that frozen scale.
Reference boosters (squared error, absolute error, and two
adaptive-Huber variants), robust permutation variable importance, a
synthetic-data benchmark harness, and a CLI are included.
"""

__version__ = "0.1.0"

from ._kernels import active_backend, available_backends, set_backend
from .baselines import BaselineSpec, baseline_train
from .boosting import (BoostConfig, Ensemble, FitTrace, argmin_stop,
                       fit_negative_gradient, line_search)
from .data import Dataset, load_csv, save_csv
from .errors import (AllOutlyingError, DataError, DegenerateScaleError,
                     LineSearchError, NoRootError, NumericalError)
from .harness import run_benchmark, train_method
from .importance import (ImportanceReport, permutation_importance,
                         recovery_fraction, robust_mad, trim_validation)
from .losses import (TUKEY_C_EFFICIENT, TUKEY_C_HIGH_BREAKDOWN, LossSpec,
                     psi, rho)
from .metrics import rmse, summarize, trmse
from .modelfile import load_model, save_model
from .mscale import ScaleSolution, mscale_gradient, solve_mscale
from .mstage import bounded_loss_gradient, rrboost_train, shrinkage_step
from .sboost import sboost_train
from .simgen import (SimSetting, calibrate_snr, eval_g, gen_errors,
                     gen_features, make_setting)
from .trees import (ColumnOrder, Tree, fit_tree, leaf_tree, predict_tree,
                    select_init_tree)

__all__ = [
    "__version__",
    "active_backend", "available_backends", "set_backend",
    "BaselineSpec", "baseline_train",
    "BoostConfig", "Ensemble", "FitTrace", "argmin_stop",
    "fit_negative_gradient", "line_search",
    "Dataset", "load_csv", "save_csv",
    "AllOutlyingError", "DataError", "DegenerateScaleError",
    "LineSearchError", "NoRootError", "NumericalError",
    "run_benchmark", "train_method",
    "ImportanceReport", "permutation_importance", "recovery_fraction",
    "robust_mad", "trim_validation",
    "TUKEY_C_EFFICIENT", "TUKEY_C_HIGH_BREAKDOWN", "LossSpec", "psi", "rho",
    "rmse", "summarize", "trmse",
    "load_model", "save_model",
    "ScaleSolution", "mscale_gradient", "solve_mscale",
    "bounded_loss_gradient", "rrboost_train", "shrinkage_step",
    "sboost_train",
    "SimSetting", "calibrate_snr", "eval_g", "gen_errors", "gen_features",
    "make_setting",
    "ColumnOrder", "Tree", "fit_tree", "leaf_tree", "predict_tree",
    "select_init_tree",
]
