"""M-estimation of the residual scale and its gradient.

The scale sigma of a residual vector r solves

    mean_i rho0(r_i / sigma) = kappa,

whose left side is continuous and non-increasing in sigma, so a
bracketing bisection is guaranteed to find the root.  The gradient of
the solved scale with respect to the fitted values has coordinates

    g_l = -C * psi0(r_l / sigma),   C = [ sum_i psi0(u_i) * u_i ]^-1,

obtained by implicit differentiation of the scale equation.  Bounded
rho0 makes g_l exactly zero for observations beyond the descending
region: gross outliers exert no pull on the fit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import AllOutlyingError, DegenerateScaleError, NoRootError
from .losses import LossSpec, psi

_MAX_ITER = 200
_MAX_EXPAND = 60
_DENOM_FLOOR_PER_OBS = 1e-12


@dataclass(frozen=True)
class ScaleSolution:
    """Solved residual scale.

    equation_residual is |mean rho0(r/sigma) - kappa| at the returned
    sigma and is at most the solver tolerance on success.
    """

    sigma: float
    n_iterations: int
    equation_residual: float


def _mean_rho(r, sigma, spec, kappa):
    return _kernels.sum_rho(r, sigma, spec.code, spec.c) / r.shape[0] - kappa


def solve_mscale(residuals, rho0: LossSpec, kappa: float | None = None,
                 tol: float = 1e-10, bracket_hint: float | None = None) -> ScaleSolution:
    """Solve the M-scale equation for a residual vector.

    Parameters
    ----------
    residuals : array_like
        Non-empty vector of finite residuals.
    rho0 : LossSpec
        The rho family of the scale equation.
    kappa : float, optional
        Target mean loss; defaults to ``rho0.kappa``.
    tol : float
        Tolerance on |mean rho0(r/sigma) - kappa|.
    bracket_hint : float, optional
        A previous solution used to warm-start the bracket.

    Raises
    ------
    DegenerateScaleError
        If every residual is exactly zero.
    NoRootError
        If no positive root exists (for bounded rho0 this happens when
        the fraction of zero residuals is at least 1 - kappa) or the
        bracket cannot be established.
    """
    r = np.ascontiguousarray(residuals, dtype=np.float64)
    if r.ndim != 1 or r.shape[0] == 0:
        raise ValueError("residuals must be a non-empty 1-d vector")
    if not np.all(np.isfinite(r)):
        raise ValueError("residuals contain non-finite values")
    if kappa is None:
        kappa = rho0.kappa
    if not kappa > 0:
        raise ValueError("kappa must be positive")

    abs_r = np.abs(r)
    n = r.shape[0]
    n_zero = int(np.count_nonzero(abs_r == 0.0))
    if n_zero == n:
        raise DegenerateScaleError("all residuals are exactly zero")
    if rho0.bounded and n_zero / n >= 1.0 - kappa:
        raise NoRootError(
            f"{n_zero}/{n} residuals are exactly zero; the scale equation "
            f"has no positive root at kappa={kappa}"
        )

    med = float(np.median(abs_r))
    if med == 0.0:
        med = float(abs_r[abs_r > 0].min())
    if bracket_hint is not None and bracket_hint > 0 and np.isfinite(bracket_hint):
        lo, hi = bracket_hint / 2.0, bracket_hint * 2.0
    else:
        lo, hi = med / 1e6, float(abs_r.max()) * 10.0

    f_lo = _mean_rho(r, lo, rho0, kappa)
    f_hi = _mean_rho(r, hi, rho0, kappa)
    n_eval = 2
    # the equation is non-increasing in sigma: expand until f(lo) > 0 > f(hi)
    expansions = 0
    while f_lo < 0.0 and expansions < _MAX_EXPAND:
        lo /= 8.0
        f_lo = _mean_rho(r, lo, rho0, kappa)
        n_eval += 1
        expansions += 1
    while f_hi > 0.0 and expansions < _MAX_EXPAND:
        hi *= 8.0
        f_hi = _mean_rho(r, hi, rho0, kappa)
        n_eval += 1
        expansions += 1
    if f_lo < 0.0 or f_hi > 0.0:
        raise NoRootError("failed to bracket the scale equation root")
    if abs(f_lo) <= tol:
        return ScaleSolution(lo, n_eval, abs(f_lo))
    if abs(f_hi) <= tol:
        return ScaleSolution(hi, n_eval, abs(f_hi))

    mid = 0.5 * (lo + hi)
    f_mid = _mean_rho(r, mid, rho0, kappa)
    it = 0
    while abs(f_mid) > tol:
        it += 1
        if it > _MAX_ITER:
            raise NoRootError(
                f"scale equation residual {abs(f_mid):.3e} stagnated above "
                f"tolerance {tol:.1e} after {_MAX_ITER} bisection steps"
            )
        if f_mid > 0.0:
            lo = mid
        else:
            hi = mid
        mid = 0.5 * (lo + hi)
        f_mid = _mean_rho(r, mid, rho0, kappa)
    assert abs(f_mid) <= tol, "scale equation not solved"
    return ScaleSolution(float(mid), n_eval + it + 1, float(abs(f_mid)))


def mscale_gradient(residuals, sigma: float, rho0: LossSpec):
    """Gradient of the solved M-scale with respect to the fitted values.

    ``sigma`` must solve the scale equation for these residuals (the
    caller's responsibility).  Raises AllOutlyingError when the
    normalizing denominator collapses, i.e. every observation sits in
    the flat region of a bounded rho0.
    """
    r = np.asarray(residuals, dtype=np.float64)
    u = r / sigma
    psi_u = psi(rho0, u)
    denom = float(psi_u @ u)
    if denom <= _DENOM_FLOOR_PER_OBS * r.shape[0]:
        raise AllOutlyingError(
            "scale gradient undefined: all observations are in the flat "
            "region of the loss"
        )
    return -psi_u / denom
