"""Constrained likelihood maximization with numerical derivatives.

Strategy: map the natural (constrained) parameter space to an
unconstrained one (log for one-sided bounds, logistic for boxes and
simplex-type budget constraints), run BFGS with central-difference
gradients from a small multi-start, and keep the best point. Convergence
means the transformed-space gradient max-norm fell below tolerance.
Standard errors come from the inverse negative Hessian of the objective
in the natural space at the optimum; a sandwich (outer-product) variant
is available when per-observation contributions are supplied.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize as spopt
from scipy.special import expit, logit
from scipy.stats import norm

GRAD_TOL = 1e-5
OBJ_TOL = 1e-8
_PENALTY = -1e15
_EPS = 1e-12


class OptimizationError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# parameter transforms


class IdentityTransform:
    def __init__(self, n: int):
        self.n_natural = self.n_free = n

    def to_natural(self, z):
        return np.asarray(z, dtype=np.float64).copy()

    def to_unconstrained(self, x):
        return np.asarray(x, dtype=np.float64).copy()


class BoxTransform:
    """Per-coordinate transform for (possibly one-sided) interval bounds."""

    def __init__(self, lower, upper):
        self.lower = np.asarray(lower, dtype=np.float64)
        self.upper = np.asarray(upper, dtype=np.float64)
        if np.any(self.lower >= self.upper):
            raise ValueError("need lower < upper")
        self.n_natural = self.n_free = len(self.lower)

    def to_natural(self, z):
        z = np.asarray(z, dtype=np.float64)
        x = np.empty_like(z)
        lo, hi = self.lower, self.upper
        for i in range(len(z)):
            if np.isinf(lo[i]) and np.isinf(hi[i]):
                x[i] = z[i]
            elif np.isinf(hi[i]):
                x[i] = lo[i] + np.exp(z[i])
            elif np.isinf(lo[i]):
                x[i] = hi[i] - np.exp(z[i])
            else:
                x[i] = lo[i] + (hi[i] - lo[i]) * expit(z[i])
        return x

    def to_unconstrained(self, x):
        x = np.asarray(x, dtype=np.float64)
        z = np.empty_like(x)
        lo, hi = self.lower, self.upper
        for i in range(len(x)):
            if np.isinf(lo[i]) and np.isinf(hi[i]):
                z[i] = x[i]
            elif np.isinf(hi[i]):
                z[i] = np.log(max(x[i] - lo[i], _EPS))
            elif np.isinf(lo[i]):
                z[i] = np.log(max(hi[i] - x[i], _EPS))
            else:
                p = (x[i] - lo[i]) / (hi[i] - lo[i])
                z[i] = logit(np.clip(p, _EPS, 1.0 - _EPS))
        return z


class SimplexTransform:
    """Non-negative parameters under one budget constraint sum(c*x) < cap.

    The first free coordinate sets the used budget through a logistic
    map; the remaining ones split it with a softmax.
    """

    def __init__(self, coefs, cap: float):
        self.coefs = np.asarray(coefs, dtype=np.float64)
        if np.any(self.coefs <= 0) or cap <= 0:
            raise ValueError("budget constraint needs positive coefficients and cap")
        self.cap = float(cap)
        self.n_natural = self.n_free = len(self.coefs)

    def to_natural(self, z):
        z = np.asarray(z, dtype=np.float64)
        used = self.cap * expit(z[0])
        if len(z) == 1:
            return np.array([used / self.coefs[0]])
        w = np.concatenate([z[1:], [0.0]])
        w = np.exp(w - w.max())
        p = w / w.sum()
        return used * p / self.coefs

    def to_unconstrained(self, x):
        x = np.asarray(x, dtype=np.float64)
        budget = self.coefs * x
        used = budget.sum()
        z0 = logit(np.clip(used / self.cap, _EPS, 1.0 - _EPS))
        if len(x) == 1:
            return np.array([z0])
        p = np.clip(budget / max(used, _EPS), _EPS, 1.0)
        return np.concatenate([[z0], np.log(p[:-1] / p[-1])])


class GjrStationarityTransform:
    """(alpha, beta, gamma) with alpha, beta >= 0, alpha + gamma >= 0 and
    alpha + beta + gamma/2 <= cap < 1.

    Internally splits the budget between the news slope x = alpha +
    gamma/2 and beta, then places gamma inside (-2x, 2x) with a tanh map.
    With asymmetry off, gamma is fixed at 0 and only two coordinates are
    free.
    """

    def __init__(self, include_asymmetry: bool = True, cap: float = 1.0 - 1e-6):
        self.asym = include_asymmetry
        self.cap = cap
        self.n_natural = 3
        self.n_free = 3 if include_asymmetry else 2

    def to_natural(self, z):
        z = np.asarray(z, dtype=np.float64)
        s = self.cap * expit(z[0])
        w = expit(z[1])
        x, beta = s * w, s * (1.0 - w)
        gamma = 2.0 * x * np.tanh(z[2]) if self.asym else 0.0
        return np.array([x - 0.5 * gamma, beta, gamma])

    def to_unconstrained(self, x):
        alpha, beta, gamma = np.asarray(x, dtype=np.float64)
        news = alpha + 0.5 * gamma
        s = news + beta
        z0 = logit(np.clip(s / self.cap, _EPS, 1.0 - _EPS))
        z1 = logit(np.clip(news / max(s, _EPS), _EPS, 1.0 - _EPS))
        if not self.asym:
            return np.array([z0, z1])
        r = gamma / max(2.0 * news, _EPS)
        return np.array([z0, z1, np.arctanh(np.clip(r, -1.0 + _EPS, 1.0 - _EPS))])


class CompositeTransform:
    """Concatenation of transforms over consecutive natural-parameter blocks."""

    def __init__(self, parts):
        self.parts = list(parts)
        self.n_natural = sum(p.n_natural for p in self.parts)
        self.n_free = sum(p.n_free for p in self.parts)

    def to_natural(self, z):
        z = np.asarray(z, dtype=np.float64)
        out, at = [], 0
        for p in self.parts:
            out.append(np.atleast_1d(p.to_natural(z[at:at + p.n_free])))
            at += p.n_free
        return np.concatenate(out)

    def to_unconstrained(self, x):
        x = np.asarray(x, dtype=np.float64)
        out, at = [], 0
        for p in self.parts:
            out.append(np.atleast_1d(p.to_unconstrained(x[at:at + p.n_natural])))
            at += p.n_natural
        return np.concatenate(out)


@dataclass(frozen=True)
class Bounds:
    """Box bounds plus optional budget constraints sum(c_i * x_i) < cap.

    Budget constraints must act on disjoint groups of coordinates whose
    lower bound is zero; everything else is handled per-coordinate.
    """

    lower: np.ndarray
    upper: np.ndarray
    linear: tuple = ()  # (indices, coefs, cap) triples

    def transform(self):
        lower = np.asarray(self.lower, dtype=np.float64)
        upper = np.asarray(self.upper, dtype=np.float64)
        taken = set()
        for idx, _, _ in self.linear:
            if taken & set(idx):
                raise ValueError("budget constraints must not overlap")
            taken |= set(idx)
        # budget groups must sit on contiguous index runs for the composite
        parts = []
        groups = {min(idx): (list(idx), coefs, cap) for idx, coefs, cap in self.linear}
        i = 0
        while i < len(lower):
            if i in groups:
                idx, coefs, cap = groups[i]
                if idx != list(range(i, i + len(idx))):
                    raise ValueError("budget constraint indices must be contiguous")
                if np.any(lower[idx] != 0.0):
                    raise ValueError("budget-constrained parameters need lower bound 0")
                parts.append(SimplexTransform(coefs, cap))
                i += len(idx)
            else:
                parts.append(BoxTransform(lower[i:i + 1], upper[i:i + 1]))
                i += 1
        return CompositeTransform(parts)


def unbounded(n: int) -> Bounds:
    return Bounds(np.full(n, -np.inf), np.full(n, np.inf))


# ---------------------------------------------------------------------------
# derivatives


def central_gradient(f, x, step: float = 1e-6):
    """Two-sided difference gradient with per-coordinate relative steps."""
    x = np.asarray(x, dtype=np.float64)
    h = np.maximum(step, step * np.abs(x))
    g = np.empty_like(x)
    for i in range(len(x)):
        e = np.zeros_like(x)
        e[i] = h[i]
        g[i] = (f(x + e) - f(x - e)) / (2.0 * h[i])
    return g


def numerical_hessian(f, x, step: float = 1e-5):
    """Symmetric two-sided Hessian with steps max(step, step * |x_i|)."""
    x = np.asarray(x, dtype=np.float64)
    k = len(x)
    h = np.maximum(step, step * np.abs(x))
    f0 = f(x)
    fp = np.empty(k)
    fm = np.empty(k)
    for i in range(k):
        e = np.zeros(k)
        e[i] = h[i]
        fp[i] = f(x + e)
        fm[i] = f(x - e)
    H = np.empty((k, k))
    for i in range(k):
        for j in range(i, k):
            if i == j:
                H[i, i] = (fp[i] - 2.0 * f0 + fm[i]) / h[i] ** 2
            else:
                ei = np.zeros(k)
                ej = np.zeros(k)
                ei[i] = h[i]
                ej[j] = h[j]
                fpp = f(x + ei + ej)
                fmm = f(x - ei - ej)
                H[i, j] = H[j, i] = (
                    (fpp - fp[i] - fp[j] + 2.0 * f0 - fm[i] - fm[j] + fmm)
                    / (2.0 * h[i] * h[j])
                )
    if not np.all(np.isfinite(H)):
        raise OptimizationError("non-finite second differences in Hessian")
    return 0.5 * (H + H.T)


def std_errors_from_hessian(H):
    """sqrt of diag(inv(-H)); NaN where the Hessian gives no valid variance."""
    k = H.shape[0]
    nan = np.full(k, np.nan)
    try:
        cov = np.linalg.inv(-H)
    except np.linalg.LinAlgError:
        return nan
    d = np.diag(cov)
    return np.where(d > 0, np.sqrt(np.abs(d)), np.nan)


def normal_p_values(estimates, std_errors):
    """Two-sided z-test p-values for H0: parameter = 0."""
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.abs(np.asarray(estimates) / np.asarray(std_errors))
    return np.where(np.isfinite(z), 2.0 * norm.sf(z), np.nan)


def sandwich_std_errors(objective, contributions, x, step: float = 1e-5):
    """Robust (outer-product) standard errors: H^-1 * OPG * H^-1.

    ``contributions(x)`` must return the per-observation terms whose sum
    is ``objective(x)``.
    """
    x = np.asarray(x, dtype=np.float64)
    k = len(x)
    H = numerical_hessian(objective, x, step)
    h = np.maximum(step, step * np.abs(x))
    scores = np.empty((len(contributions(x)), k))
    for i in range(k):
        e = np.zeros(k)
        e[i] = h[i]
        scores[:, i] = (contributions(x + e) - contributions(x - e)) / (2.0 * h[i])
    opg = scores.T @ scores
    try:
        hinv = np.linalg.inv(H)
    except np.linalg.LinAlgError:
        return np.full(k, np.nan)
    cov = hinv @ opg @ hinv
    d = np.diag(cov)
    return np.where(d > 0, np.sqrt(np.abs(d)), np.nan)


# ---------------------------------------------------------------------------
# maximization


@dataclass
class Optimum:
    point: np.ndarray
    objective: float
    converged: bool
    iterations: int
    n_evals: int
    grad_max_norm: float
    std_errors: np.ndarray | None = None
    p_values: np.ndarray | None = None
    message: str = ""


def maximize(objective, start, bounds: Bounds | None = None, *, transform=None,
             n_starts: int = 5, seed: int = 0, max_iter: int = 2000,
             perturb: float = 0.5, compute_se: bool = True,
             grad_step: float = 1e-6) -> Optimum:
    """Maximize a scalar objective over a constrained parameter space.

    The best of ``n_starts`` BFGS runs (the given start plus seeded
    perturbations in the unconstrained space) is returned. Non-finite
    objective values are treated as a large penalty so quasi-Newton line
    searches back off infeasible regions.
    """
    start = np.asarray(start, dtype=np.float64)
    if transform is None:
        transform = bounds.transform() if bounds is not None else IdentityTransform(len(start))
    if not np.isfinite(objective(start)):
        raise OptimizationError("objective is not finite at the start point")

    n_evals = 0

    def f_z(z):
        nonlocal n_evals
        n_evals += 1
        v = objective(transform.to_natural(z))
        return v if np.isfinite(v) else _PENALTY

    def neg(z):
        return -f_z(z)

    def neg_grad(z):
        return central_gradient(neg, z, grad_step)

    z0 = transform.to_unconstrained(start)
    rng = np.random.default_rng(seed)
    starts = [z0] + [z0 + perturb * rng.standard_normal(len(z0))
                     for _ in range(max(0, n_starts - 1))]

    best = None
    for z_init in starts:
        if f_z(z_init) <= _PENALTY:
            continue
        res = spopt.minimize(neg, z_init, jac=neg_grad, method="BFGS",
                             options={"gtol": GRAD_TOL, "maxiter": max_iter})
        if best is None or -res.fun > -best.fun:
            best = res
    if best is None:
        raise OptimizationError("objective was non-finite at every start")

    grad = central_gradient(f_z, best.x, grad_step)
    gnorm = float(np.max(np.abs(grad)))
    if gnorm >= GRAD_TOL:
        retry = spopt.minimize(neg, best.x, jac=neg_grad, method="BFGS",
                               options={"gtol": GRAD_TOL, "maxiter": max_iter})
        if -retry.fun >= -best.fun:
            best = retry
            grad = central_gradient(f_z, best.x, grad_step)
            gnorm = float(np.max(np.abs(grad)))

    x_opt = transform.to_natural(best.x)
    value = float(-best.fun)
    converged = bool(gnorm < GRAD_TOL and best.nit < max_iter and value > _PENALTY)

    se = pv = None
    if compute_se:
        try:
            H = numerical_hessian(objective, x_opt)
            se = std_errors_from_hessian(H)
            pv = normal_p_values(x_opt, se)
        except OptimizationError:
            se = pv = None
    return Optimum(x_opt, value, converged, int(best.nit), n_evals, gnorm,
                   se, pv, str(best.message))
