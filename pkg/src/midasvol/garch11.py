"""Univariate GARCH(1,1) with optional GJR asymmetry.

Used as the volatility step before correlation modeling and as the
nested single-component benchmark for the two-component model. The
variance recursion starts at the unconditional level omega / (1 - alpha
- gamma/2 - beta), which makes the theta = 0 two-component model an
exact reparameterization of this one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import optimize as opt
from .kernels import garch_recursion

_LOG_2PI = math.log(2.0 * math.pi)


@dataclass(frozen=True)
class Garch11Params:
    mu: float
    omega: float
    alpha: float
    beta: float
    gamma: float = 0.0

    def persistence(self) -> float:
        return self.alpha + 0.5 * self.gamma + self.beta

    def validate(self):
        if self.omega <= 0:
            raise ValueError("omega must be positive")
        if self.alpha < 0 or self.beta < 0 or self.alpha + self.gamma < 0:
            raise ValueError("negative news impact")
        if self.persistence() >= 1:
            raise ValueError("non-stationary: alpha + gamma/2 + beta >= 1")


def variance_path(returns: np.ndarray, params: Garch11Params) -> np.ndarray:
    resid = np.asarray(returns, dtype=np.float64) - params.mu
    h1 = params.omega / (1.0 - params.persistence())
    return garch_recursion(resid, params.omega, params.alpha, params.beta,
                           params.gamma, h1)


def log_likelihood(returns: np.ndarray, params: Garch11Params) -> float:
    try:
        params.validate()
    except ValueError:
        return -np.inf
    resid = np.asarray(returns, dtype=np.float64) - params.mu
    h = variance_path(returns, params)
    if np.any(h <= 0) or not np.all(np.isfinite(h)):
        return -np.inf
    value = -0.5 * (len(resid) * _LOG_2PI + np.sum(np.log(h)) + np.sum(resid ** 2 / h))
    return float(value) if np.isfinite(value) else -np.inf


@dataclass(frozen=True)
class Garch11Fit:
    params: Garch11Params
    std_errors: dict[str, float]
    p_values: dict[str, float]
    llh: float
    bic: float
    n_obs: int
    converged: bool
    variance: np.ndarray
    residuals: np.ndarray  # standardized
    optimum: opt.Optimum

    @property
    def param_names(self) -> tuple[str, ...]:
        return tuple(self.std_errors)


def fit(returns: np.ndarray, include_asymmetry: bool = False, *, n_starts: int = 5,
        seed: int = 0, max_iter: int = 2000) -> Garch11Fit:
    """Maximum-likelihood fit of the (GJR-)GARCH(1,1) model."""
    r = np.asarray(returns, dtype=np.float64)
    if len(r) < 50:
        raise ValueError("need at least 50 observations to fit GARCH(1,1)")
    var = float(np.var(r))
    if var == 0.0:
        raise ValueError("constant series")

    names = ["mu", "omega", "alpha", "beta"] + (["gamma"] if include_asymmetry else [])

    # the natural vector is always (mu, omega, alpha, beta, gamma); with
    # asymmetry off the transform pins gamma = 0 and frees 4 coordinates
    def objective_nat(x):
        return log_likelihood(r, Garch11Params(*x))

    transform = opt.CompositeTransform([
        opt.IdentityTransform(1),
        opt.BoxTransform([0.0], [np.inf]),
        opt.GjrStationarityTransform(include_asymmetry),
    ])
    alpha0, beta0, gamma0 = 0.05, 0.90, (0.05 if include_asymmetry else 0.0)
    omega0 = var * (1.0 - alpha0 - 0.5 * gamma0 - beta0)
    start_nat = np.array([float(np.mean(r)), omega0, alpha0, beta0, gamma0])

    res = opt.maximize(objective_nat, start_nat, transform=transform,
                       n_starts=n_starts, seed=seed, max_iter=max_iter,
                       compute_se=False)
    x_free = res.point[:4] if not include_asymmetry else res.point

    def objective_free(xf):
        full = np.append(xf, 0.0) if not include_asymmetry else xf
        return objective_nat(full)

    try:
        H = opt.numerical_hessian(objective_free, x_free)
        se = opt.std_errors_from_hessian(H)
        pv = opt.normal_p_values(x_free, se)
    except opt.OptimizationError:
        se = np.full(len(x_free), np.nan)
        pv = np.full(len(x_free), np.nan)

    params = Garch11Params(*res.point)
    h = variance_path(r, params)
    k = len(x_free)
    bic = k * math.log(len(r)) - 2.0 * res.objective
    return Garch11Fit(
        params=params,
        std_errors=dict(zip(names, se.tolist())),
        p_values=dict(zip(names, pv.tolist())),
        llh=res.objective,
        bic=bic,
        n_obs=len(r),
        converged=res.converged,
        variance=h,
        residuals=(r - params.mu) / np.sqrt(h),
        optimum=res,
    )


def simulate(params: Garch11Params, n: int, seed: int = 0) -> np.ndarray:
    """Generate a return path from the model (for testing and validation)."""
    params.validate()
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(n)
    r = np.empty(n)
    h = params.omega / (1.0 - params.persistence())
    e_prev = 0.0
    for t in range(n):
        if t > 0:
            coef = params.alpha + (params.gamma if e_prev < 0 else 0.0)
            h = params.omega + coef * e_prev ** 2 + params.beta * h
        e_prev = math.sqrt(h) * z[t]
        r[t] = params.mu + e_prev
    return r
