"""Two-component mixed-frequency volatility model.

Daily conditional variance factors into a slow component tau, driven by
one or two low-frequency covariates through a MIDAS lag filter, and a
mean-reverting unit-mean GJR-GARCH component g:

    r_d = mu + sqrt(tau_d * g_d) * eps_d,        eps ~ N(0, 1)
    g_d = (1 - alpha - gamma/2 - beta)
          + (alpha + gamma * 1[resid_{d-1} < 0]) * resid_{d-1}^2 / tau_d
          + beta * g_{d-1}
    tau = m + sum_j theta_j * filter_j            (identity link)
    tau = exp(m + sum_j theta_j * filter_j)       (log link)

The first K periods of each covariate (net of any pre-span history) are
excluded from the likelihood; there is no presample backcasting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from . import optimize as opt
from .kernels import gjr_recursion, gjr_simulate_block
from .timeseries import (DAILY, MONTHLY, DataError, DatedSeries, MixedPanel,
                         build_panel)
from .weights import BetaWeights, ExpWeights, WeightScheme, free_parameters, weights, with_parameters

_LOG_2PI = math.log(2.0 * math.pi)

IDENTITY = "identity"
LOG = "log"


@dataclass(frozen=True)
class CovariateSpec:
    name: str
    lag: int
    scheme: WeightScheme = BetaWeights(1.0, 3.0)


@dataclass(frozen=True)
class GarchMidasModel:
    covariates: tuple[CovariateSpec, ...]
    link: str = LOG
    include_asymmetry: bool = True

    def __post_init__(self):
        if not 1 <= len(self.covariates) <= 2:
            raise ValueError("model takes 1 or 2 covariates")
        if self.link not in (IDENTITY, LOG):
            raise ValueError(f"unknown link {self.link!r}")
        names = [c.name for c in self.covariates]
        if len(set(names)) != len(names):
            raise ValueError("covariate names must be distinct")


@dataclass(frozen=True)
class GarchMidasParams:
    mu: float
    alpha: float
    beta: float
    gamma: float
    m: float
    thetas: tuple[float, ...]
    schemes: tuple[WeightScheme, ...]

    def persistence(self) -> float:
        return self.alpha + 0.5 * self.gamma + self.beta

    def validate(self):
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("alpha and beta must be non-negative")
        if self.alpha + self.gamma < 0:
            raise ValueError("negative news impact: alpha + gamma < 0")
        if self.persistence() >= 1:
            raise ValueError("non-stationary: alpha + beta + gamma/2 >= 1")
        if len(self.thetas) != len(self.schemes):
            raise ValueError("one weight scheme per theta")


@dataclass(frozen=True)
class SampleInfo:
    start_day: int  # index of the first likelihood day in the panel
    n_days: int
    first_date: str
    last_date: str


# ---------------------------------------------------------------------------
# design: parameter-independent lag structure, built once per panel/model


class _Design:
    def __init__(self, panel: MixedPanel, model: GarchMidasModel):
        start_day = 0
        lag_info = []
        for spec in model.covariates:
            pc = panel.covariate(spec.name)
            if pc.lag != spec.lag:
                raise DataError(
                    f"covariate {spec.name!r}: panel lag {pc.lag} != model lag {spec.lag}"
                )
            ffp = pc.first_feasible_period()
            if pc.frequency == MONTHLY:
                first_day = int(np.searchsorted(panel.month_index, ffp, side="left"))
            else:
                first_day = ffp
            lag_info.append((pc, ffp))
            start_day = max(start_day, first_day)
        if start_day >= panel.n_days:
            raise DataError("no likelihood days left after burn-in")

        self.panel = panel
        self.model = model
        self.start_day = start_day
        self.dates = panel.day_dates[start_day:]
        self.returns = panel.returns[start_day:]
        self.n_days = len(self.returns)

        self.day_lags: list[np.ndarray] = []
        for pc, ffp in lag_info:
            K = pc.lag
            n_periods = pc.n_periods()
            windows = sliding_window_view(pc.values, K)
            s0 = pc.n_pre + ffp - K  # window start for the first feasible period
            per_period = windows[s0:s0 + n_periods - ffp][:, ::-1]
            if pc.frequency == MONTHLY:
                rows = panel.month_index[start_day:] - ffp
            else:
                rows = np.arange(start_day, panel.n_days) - ffp
            self.day_lags.append(np.ascontiguousarray(per_period[rows]))

    def tau(self, params: GarchMidasParams) -> np.ndarray:
        acc = np.full(self.n_days, params.m)
        for theta, scheme, lags, spec in zip(params.thetas, params.schemes,
                                             self.day_lags, self.model.covariates):
            if theta != 0.0:
                acc += theta * (lags @ weights(scheme, spec.lag))
        return np.exp(acc) if self.model.link == LOG else acc

    def loglik(self, params: GarchMidasParams):
        """(llh, tau, g); llh is -inf at infeasible points."""
        tau = self.tau(params)
        if not np.all(np.isfinite(tau)) or np.any(tau <= 0.0):
            return -np.inf, None, None
        resid = self.returns - params.mu
        g = gjr_recursion(resid, tau, params.alpha, params.beta, params.gamma)
        v = g * tau
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            value = -0.5 * (self.n_days * _LOG_2PI + np.sum(np.log(v))
                            + np.sum(resid ** 2 / v))
        if not np.isfinite(value):
            return -np.inf, None, None
        return float(value), tau, g


# ---------------------------------------------------------------------------
# public components


def long_run_component(panel: MixedPanel, model: GarchMidasModel,
                       params: GarchMidasParams) -> DatedSeries:
    """Daily long-run variance path over the post-burn-in days."""
    params.validate()
    design = _Design(panel, model)
    tau = design.tau(params)
    if model.link == IDENTITY and np.any(tau <= 0.0):
        d = design.dates[int(np.argmax(tau <= 0.0))]
        raise ValueError(f"identity link gives non-positive tau at {d}")
    return DatedSeries(design.dates, tau, DAILY, "tau")


def short_run_component(panel: MixedPanel, tau: DatedSeries | np.ndarray,
                        params: GarchMidasParams) -> DatedSeries:
    """Daily short-run component given an aligned long-run path.

    The recursion starts at g = 1 and runs continuously across period
    boundaries.
    """
    params.validate()
    if isinstance(tau, DatedSeries):
        start = int(np.searchsorted(panel.day_dates, tau.dates[0]))
        if not np.array_equal(panel.day_dates[start:], tau.dates):
            raise DataError("tau dates are not a suffix of the panel days")
        tau_values, dates = tau.values, tau.dates
    else:
        tau_values = np.asarray(tau, dtype=np.float64)
        start = panel.n_days - len(tau_values)
        dates = panel.day_dates[start:]
    if np.any(tau_values <= 0.0):
        raise ValueError("tau must be strictly positive")
    resid = panel.returns[start:] - params.mu
    g = gjr_recursion(resid, tau_values, params.alpha, params.beta, params.gamma)
    return DatedSeries(dates, g, DAILY, "g")


def log_likelihood(panel: MixedPanel, model: GarchMidasModel,
                   params: GarchMidasParams) -> float:
    """Gaussian log-likelihood over post-burn-in days (-inf when infeasible)."""
    params.validate()
    value, _, _ = _Design(panel, model).loglik(params)
    return value


# ---------------------------------------------------------------------------
# estimation


@dataclass(frozen=True)
class GarchMidasFit:
    model: GarchMidasModel
    params: GarchMidasParams
    param_names: tuple[str, ...]
    estimates: np.ndarray
    std_errors: np.ndarray
    p_values: np.ndarray
    llh: float
    bic: float
    vr: float
    tau_path: DatedSeries
    g_path: DatedSeries
    sample_info: SampleInfo
    converged: bool
    optimum: opt.Optimum

    def estimate(self, name: str) -> float:
        return float(self.estimates[self.param_names.index(name)])

    def to_report(self) -> dict:
        def clean(arr):
            return [None if not np.isfinite(v) else float(v) for v in arr]

        return {
            "params": dict(zip(self.param_names, clean(self.estimates))),
            "std_errors": dict(zip(self.param_names, clean(self.std_errors))),
            "p_values": dict(zip(self.param_names, clean(self.p_values))),
            "llh": self.llh,
            "bic": self.bic,
            "vr": self.vr,
            "converged": self.converged,
            "n_obs": self.sample_info.n_days,
            "sample": {
                "burn_in_days": self.sample_info.start_day,
                "first_date": self.sample_info.first_date,
                "last_date": self.sample_info.last_date,
            },
            "link": self.model.link,
            "covariates": [
                {"name": c.name, "lag": c.lag, "scheme": type(c.scheme).__name__}
                for c in self.model.covariates
            ],
        }


class _ParamLayout:
    """Maps the free natural vector used by the optimizer to params.

    ``fixed`` pins named parameters (mu, m, theta_<cov>, w1_<cov>,
    w2_<cov>, omega_<cov>). Fixing a covariate's theta also pins its
    weight parameters, which the likelihood no longer identifies.
    """

    def __init__(self, model: GarchMidasModel, start: GarchMidasParams,
                 fixed: dict[str, float] | None):
        fixed = dict(fixed or {})
        self.model = model
        self.names: list[str] = []
        parts: list = []
        start_nat: list[float] = []
        plan: list[tuple[str, str, float | None]] = []  # (kind, name, fixed value)

        def scalar(name, value, transform):
            if name in fixed:
                plan.append(("fixed", name, float(fixed.pop(name))))
            else:
                plan.append(("free", name, None))
                self.names.append(name)
                parts.append(transform)
                start_nat.append(value)

        scalar("mu", start.mu, opt.IdentityTransform(1))
        plan.append(("gjr", "", None))
        parts.append(opt.GjrStationarityTransform(model.include_asymmetry))
        start_nat.extend([start.alpha, start.beta, start.gamma])
        self.names.extend(["alpha", "beta"] + (["gamma"] if model.include_asymmetry else []))
        scalar("m", start.m, opt.IdentityTransform(1))
        for spec, theta0, scheme0 in zip(model.covariates, start.thetas, start.schemes):
            theta_name = f"theta_{spec.name}"
            theta_fixed = theta_name in fixed
            scalar(theta_name, theta0, opt.IdentityTransform(1))
            for pname in free_parameters(scheme0):
                full = f"{pname}_{spec.name}"
                value = getattr(scheme0, pname)
                if theta_fixed and full not in fixed:
                    fixed[full] = value  # unidentified once theta is pinned
                if pname == "omega":
                    scalar(full, value, opt.BoxTransform([0.0], [1.0]))
                else:
                    scalar(full, value, opt.BoxTransform([1.0], [np.inf]))
        if fixed:
            raise ValueError(f"unknown fixed parameters: {sorted(fixed)}")
        self.plan = plan
        self.transform = opt.CompositeTransform(parts)
        self.start_nat = np.array(start_nat)
        self.include_asymmetry = model.include_asymmetry

    def assemble(self, x_nat: np.ndarray) -> GarchMidasParams:
        """Natural optimizer vector (with the 3-wide GJR block) -> params."""
        values: dict[str, float] = {}
        at = 0
        abg = (0.0, 0.0, 0.0)
        for kind, name, fval in self.plan:
            if kind == "fixed":
                values[name] = fval
            elif kind == "gjr":
                abg = tuple(x_nat[at:at + 3])
                at += 3
            else:
                values[name] = float(x_nat[at])
                at += 1
        model = self.model
        thetas, schemes = [], []
        for spec in model.covariates:
            thetas.append(values[f"theta_{spec.name}"])
            fp = {p: values[f"{p}_{spec.name}"] for p in free_parameters(spec.scheme)}
            schemes.append(with_parameters(spec.scheme, fp))
        return GarchMidasParams(values["mu"], abg[0], abg[1], abg[2], values["m"],
                                tuple(thetas), tuple(schemes))

    def reported(self, x_nat: np.ndarray) -> np.ndarray:
        """Natural vector restricted to the reported (free) parameters."""
        out = []
        at = 0
        for kind, _name, _f in self.plan:
            if kind == "fixed":
                continue
            if kind == "gjr":
                out.extend(x_nat[at:at + 3] if self.include_asymmetry else x_nat[at:at + 2])
                at += 3
            else:
                out.append(x_nat[at])
                at += 1
        return np.array(out)

    def natural_from_reported(self, x_rep: np.ndarray, x_nat_ref: np.ndarray) -> np.ndarray:
        """Inverse of :meth:`reported`, holding pinned gamma at its value."""
        out = x_nat_ref.copy()
        ri = 0
        at = 0
        for kind, _name, _f in self.plan:
            if kind == "fixed":
                continue
            if kind == "gjr":
                take = 3 if self.include_asymmetry else 2
                out[at:at + take] = x_rep[ri:ri + take]
                ri += take
                at += 3
            else:
                out[at] = x_rep[ri]
                ri += 1
                at += 1
        return out


def default_start(panel: MixedPanel, model: GarchMidasModel) -> GarchMidasParams:
    design = _Design(panel, model)
    var = float(np.var(design.returns))
    m0 = math.log(var) if model.link == LOG else var
    gamma0 = 0.05 if model.include_asymmetry else 0.0
    return GarchMidasParams(0.0, 0.05, 0.90, gamma0, m0,
                            tuple(0.0 for _ in model.covariates),
                            tuple(c.scheme for c in model.covariates))


def fit(panel: MixedPanel, model: GarchMidasModel,
        start: GarchMidasParams | None = None, *, fixed: dict[str, float] | None = None,
        n_starts: int = 5, seed: int = 0, max_iter: int = 2000,
        robust_se: bool = False) -> GarchMidasFit:
    """Maximum-likelihood fit.

    Non-convergence is reported through ``converged`` rather than raised;
    the best point found is still returned. ``robust_se`` switches the
    covariance estimate from the inverse Hessian to the sandwich form.
    """
    design = _Design(panel, model)
    if design.n_days < 30:
        raise DataError(f"only {design.n_days} likelihood days after burn-in")
    if start is None:
        start = default_start(panel, model)
    start.validate()
    if len(start.thetas) != len(model.covariates):
        raise ValueError("start parameters do not match the model's covariates")
    layout = _ParamLayout(model, start, fixed)

    def objective_nat(x_nat):
        return design.loglik(layout.assemble(x_nat))[0]

    res = opt.maximize(objective_nat, layout.start_nat, transform=layout.transform,
                       n_starts=n_starts, seed=seed, max_iter=max_iter,
                       compute_se=False)
    params = layout.assemble(res.point)
    llh, tau, g = design.loglik(params)
    x_rep = layout.reported(res.point)

    def objective_rep(xr):
        return objective_nat(layout.natural_from_reported(xr, res.point))

    try:
        if robust_se:
            def contributions(xr):
                p = layout.assemble(layout.natural_from_reported(xr, res.point))
                t = design.tau(p)
                resid = design.returns - p.mu
                gg = gjr_recursion(resid, t, p.alpha, p.beta, p.gamma)
                v = gg * t
                return -0.5 * (_LOG_2PI + np.log(v) + resid ** 2 / v)

            se = opt.sandwich_std_errors(objective_rep, contributions, x_rep)
        else:
            se = opt.std_errors_from_hessian(opt.numerical_hessian(objective_rep, x_rep))
        pv = opt.normal_p_values(x_rep, se)
    except opt.OptimizationError:
        se = np.full(len(x_rep), np.nan)
        pv = np.full(len(x_rep), np.nan)

    k = len(x_rep)
    bic = k * math.log(design.n_days) - 2.0 * llh
    tau_path = DatedSeries(design.dates, tau, DAILY, "tau")
    g_path = DatedSeries(design.dates, g, DAILY, "g")
    info = SampleInfo(design.start_day, design.n_days,
                      str(design.dates[0]), str(design.dates[-1]))
    return GarchMidasFit(model, params, tuple(layout.names), x_rep, se, pv,
                         llh, bic, _variance_ratio(tau, g), tau_path, g_path,
                         info, res.converged, res)


def _variance_ratio(tau: np.ndarray, g: np.ndarray) -> float:
    log_tau = np.log(tau)
    log_total = log_tau + np.log(g)
    denom = float(np.var(log_total))
    if denom == 0.0:
        raise ValueError("total conditional volatility is constant")
    return 100.0 * float(np.var(log_tau)) / denom


def variance_ratio(fit: GarchMidasFit) -> float:
    """Share (percent) of log total-variance variation carried by tau."""
    return _variance_ratio(fit.tau_path.values, fit.g_path.values)


# ---------------------------------------------------------------------------
# simulation


RV_FEEDBACK = "rv"


def _steady_state_tau(model, params, days):
    """Approximate stationary tau for initializing realized-variance feedback."""
    if model.link == IDENTITY:
        theta_n = sum(params.thetas) * days
        if theta_n >= 1.0:
            raise ValueError("explosive feedback: theta * days_per_period >= 1")
        return (params.m + sum(params.thetas) * days * params.mu ** 2) / (1.0 - theta_n)
    tau = math.exp(params.m)
    for _ in range(200):
        new = math.exp(params.m + sum(params.thetas) * days * (tau + params.mu ** 2))
        if not math.isfinite(new) or new > 1e12:
            raise ValueError("explosive feedback in log link")
        if abs(new - tau) < 1e-12 * max(1.0, tau):
            return new
        tau = new
    return tau


def simulate(model: GarchMidasModel, params: GarchMidasParams, n_periods: int,
             days_per_period: int, covariate_generator, seed: int) -> MixedPanel:
    """Generate a synthetic panel from the model.

    ``covariate_generator`` maps covariate names to either the string
    ``"rv"`` (the covariate is the panel's own realized variance, fed
    back period by period) or a callable ``gen(rng, n) -> array`` of
    exogenous period values. A bare string/callable is accepted for
    single-covariate models. Covariates are monthly-period only. The
    returned panel carries each covariate with a full K periods of
    pre-span history, so fits on it start at the first return day.
    """
    params.validate()
    if not 1 <= days_per_period <= 28:
        raise ValueError("days_per_period must be in 1..28")
    if n_periods < 1:
        raise ValueError("n_periods must be positive")
    if not isinstance(covariate_generator, dict):
        if len(model.covariates) != 1:
            raise ValueError("pass a dict of generators for multi-covariate models")
        covariate_generator = {model.covariates[0].name: covariate_generator}

    rng = np.random.default_rng(seed)
    warmup = max((c.lag for c in model.covariates
                  if covariate_generator.get(c.name) == RV_FEEDBACK), default=0)
    total = warmup + n_periods

    values: dict[str, np.ndarray] = {}
    feedback: set[str] = set()
    for spec in model.covariates:
        gen = covariate_generator.get(spec.name)
        if gen is None:
            raise ValueError(f"no generator for covariate {spec.name!r}")
        if gen == RV_FEEDBACK:
            feedback.add(spec.name)
            buf = np.empty(spec.lag + total)
            buf[:spec.lag] = np.nan  # filled below from the steady state
            values[spec.name] = buf
        else:
            values[spec.name] = np.asarray(gen(rng, spec.lag + total), dtype=np.float64)
            if len(values[spec.name]) != spec.lag + total:
                raise ValueError(f"generator for {spec.name!r} returned wrong length")

    if feedback:
        tau0 = _steady_state_tau(model, params, days_per_period)
        rv0 = days_per_period * (tau0 + params.mu ** 2)
        for name in feedback:
            spec = next(c for c in model.covariates if c.name == name)
            values[name][:spec.lag] = rv0

    phis = [weights(sch, spec.lag)
            for sch, spec in zip(params.schemes, model.covariates)]
    returns = np.empty(total * days_per_period)
    g_prev, resid_prev, has_prev = 1.0, 0.0, False
    for t in range(total):
        acc = params.m
        for theta, phi, spec in zip(params.thetas, phis, model.covariates):
            hist = values[spec.name]
            lagged = hist[spec.lag + t - 1::-1][:spec.lag]
            acc += theta * float(phi @ lagged)
        tau_t = math.exp(acc) if model.link == LOG else acc
        if not math.isfinite(tau_t) or tau_t <= 0.0:
            raise ValueError(f"infeasible parameters: tau <= 0 in period {t}")
        block, _g, g_prev, resid_prev = gjr_simulate_block(
            np.full(days_per_period, tau_t), rng.standard_normal(days_per_period),
            params.mu, params.alpha, params.beta, params.gamma,
            g_prev, resid_prev, has_prev)
        has_prev = True
        returns[t * days_per_period:(t + 1) * days_per_period] = block
        for name in feedback:
            spec = next(c for c in model.covariates if c.name == name)
            values[name][spec.lag + t] = float(block @ block)

    # calendar: one synthetic month per period, panel starts after warmup
    first_month = np.datetime64("2000-01", "M")
    day_dates = np.concatenate([
        (first_month + warmup + t).astype("datetime64[D]") + np.arange(days_per_period)
        for t in range(n_periods)
    ])
    ret_series = DatedSeries(day_dates, returns[warmup * days_per_period:], DAILY, "r")

    cov_inputs = []
    for spec in model.covariates:
        hist = values[spec.name]
        # keep exactly K months of pre-span history plus the panel months
        vals = hist[warmup:] if spec.name in feedback else hist[warmup:]
        months = first_month + warmup - spec.lag + np.arange(spec.lag + n_periods)
        cov_inputs.append((DatedSeries(months.astype("datetime64[D]"), vals,
                                       MONTHLY, spec.name), spec.lag))
    return build_panel(ret_series, cov_inputs)
