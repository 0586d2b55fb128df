"""Synthetic regression experiments with controlled contamination.

Responses follow y = g(x) + C * eps where g is one of three fixed
regression surfaces over uniform features, eps one of five error
models, and C is calibrated by Monte Carlo so that
Var(g(x)) / Var(C * eps) hits a requested signal-to-noise ratio.
Correlated uniform features come from a Gaussian copula: a correlated
Gaussian draw mapped through the normal CDF, which preserves the
independent case exactly and the correlated targets up to the usual
mild copula attenuation.

Error models:

    D0  standard normal
    D1  symmetric gross errors: (1-a) N(0,1) + a/2 N(+-20, 0.1^2)
    D2  asymmetric gross errors: (1-a) N(0,1) + a N(20, 0.1^2)
    D3  centered log-normal: exp(N(0,1)) - sqrt(e)
    D4  Student t with 1 df (no variance; C uses a nominal unit
        error variance, recorded in run manifests)
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import ndtr

from .data import Dataset

G_FUNCTIONS = ("g1", "g2", "g3")
CORR_STRUCTURES = ("S0", "S1", "S2")
ERROR_KINDS = ("D0", "D1", "D2", "D3", "D4")

# feature indices actually entering each regression surface
ACTIVE_FEATURES = {"g1": (0, 1, 2, 3, 4), "g2": (0, 1, 2, 3), "g3": (0, 1, 2, 3, 4)}
_BLOCKS = {
    "g1": ((0, 1, 2), (3, 4)),
    "g2": ((0, 1), (2, 3)),
    "g3": ((0, 1, 2), (3, 4)),
}


def _min_features(g_which: str) -> int:
    return 4 if g_which == "g2" else 5


@dataclass(frozen=True)
class SimSetting:
    """One synthetic experiment: surface, correlation, errors, sizes."""

    g: str = "g1"
    corr: str = "S0"
    noise: str = "D0"
    alpha: float = 0.0
    n_train: int = 300
    n_val: int = 200
    n_test: int = 1000
    p: int = 10
    snr: float = 6.0
    seed: int = 0

    def __post_init__(self):
        if self.g not in G_FUNCTIONS:
            raise ValueError(f"unknown regression function {self.g!r}")
        if self.corr not in CORR_STRUCTURES:
            raise ValueError(f"unknown correlation structure {self.corr!r}")
        if self.noise not in ERROR_KINDS:
            raise ValueError(f"unknown error model {self.noise!r}")
        if self.p < _min_features(self.g):
            raise ValueError(f"{self.g} needs at least {_min_features(self.g)} features")
        if not self.snr > 0:
            raise ValueError("snr must be positive")

    def label(self) -> str:
        if self.noise in ("D1", "D2"):
            return f"{self.noise}({self.alpha * 100:g}%)"
        return self.noise


def eval_g(which: str, x):
    """Evaluate a regression surface on a feature row or matrix."""
    X = np.asarray(x, dtype=np.float64)
    single = X.ndim == 1
    if single:
        X = X[None, :]
    if X.shape[1] < _min_features(which):
        raise ValueError(f"{which} needs at least {_min_features(which)} features")
    if which == "g1":
        out = (2.0 * X[:, 0] - 2.0 * X[:, 1] + 8.0 * (X[:, 2] - 0.5) ** 2
               + np.exp(X[:, 3])
               + 0.5 * np.cos(8.0 * np.pi * X[:, 4]) * np.exp(2.0 * X[:, 4]))
    elif which == "g2":
        denom = X[:, 1] * X[:, 3]
        if np.any(denom == 0.0):
            raise ValueError("g2 undefined where x2 * x4 = 0")
        inner = X[:, 1] * X[:, 2] - 1.0 / denom
        out = 5.0 * np.sqrt(X[:, 0] ** 2 + inner ** 2)
    elif which == "g3":
        j = np.arange(1, 6)
        signs = (-1.0) ** j
        s1 = np.sum(1.0 + signs * 0.8 * X[:, :5] + np.sin(6.0 * X[:, :5]), axis=1)
        s2 = np.sum(1.0 + X[:, :3] / 3.0, axis=1)
        out = s1 * s2
    else:
        raise ValueError(f"unknown regression function {which!r}")
    return float(out[0]) if single else out


def corr_matrix(p: int, structure: str, g_which: str):
    """Target correlation matrix, or None for independent features."""
    if structure == "S0":
        return None
    if structure == "S1":
        idx = np.arange(p)
        return 0.8 ** np.abs(idx[:, None] - idx[None, :])
    mat = np.eye(p)
    for block in _BLOCKS[g_which]:
        for i in block:
            for j in block:
                if i != j:
                    mat[i, j] = 0.8
    return mat


def gen_features(n: int, p: int, structure: str, g_which: str, rng) -> np.ndarray:
    """Draw n feature rows with uniform marginals and the requested
    correlation at the Gaussian stage of the copula."""
    if p < _min_features(g_which):
        raise ValueError(f"{g_which} needs at least {_min_features(g_which)} features")
    z = rng.standard_normal((n, p))
    corr = corr_matrix(p, structure, g_which)
    if corr is not None:
        chol = np.linalg.cholesky(corr)
        z = z @ chol.T
    u = ndtr(z)
    if g_which == "g2":
        # denominator coordinates live on (1, 2) instead of (0, 1)
        u[:, 1] += 1.0
        u[:, 3] += 1.0
    return u


def gen_errors(kind: str, alpha: float, n: int, rng) -> np.ndarray:
    """Draw n error realizations from one of the five models."""
    if kind in ("D1", "D2") and not 0.0 <= alpha < 0.5:
        raise ValueError("contamination fraction must lie in [0, 0.5)")
    if kind == "D0":
        return rng.standard_normal(n)
    if kind == "D1":
        u = rng.random(n)
        z = rng.standard_normal(n)
        return np.where(u < 0.5 * alpha, 20.0 + 0.1 * z,
                        np.where(u < alpha, -20.0 + 0.1 * z, z))
    if kind == "D2":
        u = rng.random(n)
        z = rng.standard_normal(n)
        return np.where(u < alpha, 20.0 + 0.1 * z, z)
    if kind == "D3":
        return rng.lognormal(0.0, 1.0, n) - math.sqrt(math.e)
    if kind == "D4":
        return rng.standard_t(1, n)
    raise ValueError(f"unknown error model {kind!r}")


def calibrate_snr(g_which: str, structure: str, kind: str, alpha: float,
                  snr: float, rng, n_draws: int = 200_000) -> float:
    """Monte Carlo error amplitude C with Var(g) / Var(C eps) = snr.

    Var(g) only involves the active coordinates, so the draw uses that
    many features regardless of p.  The error variance is taken as the
    nominal unit variance of the clean N(0, 1) component for every
    error model, so C is identical across models of one experiment:
    gross-error components then land ~20 clean-noise units out, the
    heavy-tailed and skewed models keep their shape at the clean-noise
    scale, and the infinite-variance t1 model needs no special case.
    """
    if not snr > 0:
        raise ValueError("snr must be positive")
    if kind not in ERROR_KINDS:
        raise ValueError(f"unknown error model {kind!r}")
    p_eff = _min_features(g_which)
    feats = gen_features(n_draws, p_eff, structure, g_which, rng)
    var_g = float(np.var(eval_g(g_which, feats)))
    return math.sqrt(var_g / snr)


def make_setting(setting: SimSetting, return_amplitude: bool = False):
    """Generate the train/validation/test triplet of one experiment.

    Training and validation responses carry the setting's error model;
    test responses always use clean normal errors with the same
    amplitude.  Fully deterministic given the setting (sub-streams for
    calibration and each split derive from the one seed).
    """
    root = np.random.SeedSequence(setting.seed)
    calib_ss, train_ss, val_ss, test_ss = root.spawn(4)
    amplitude = calibrate_snr(setting.g, setting.corr, setting.noise,
                              setting.alpha, setting.snr,
                              np.random.default_rng(calib_ss))

    def draw(n, ss, kind):
        rng = np.random.default_rng(ss)
        X = gen_features(n, setting.p, setting.corr, setting.g, rng)
        eps = gen_errors(kind, setting.alpha, n, rng)
        return Dataset(X, eval_g(setting.g, X) + amplitude * eps)

    train = draw(setting.n_train, train_ss, setting.noise)
    val = draw(setting.n_val, val_ss, setting.noise)
    test = draw(setting.n_test, test_ss, "D0")
    if return_amplitude:
        return train, val, test, amplitude
    return train, val, test


def with_noise(setting: SimSetting, kind: str, alpha: float = 0.0,
               seed: int | None = None) -> SimSetting:
    """Copy of a setting with a different error model (and seed)."""
    return replace(setting, noise=kind, alpha=alpha,
                   seed=setting.seed if seed is None else seed)
