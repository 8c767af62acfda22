"""Descriptive statistics, the normality/dependence test battery, and the
autoregressive squared-residual volatility proxy.

Kurtosis is reported as excess kurtosis throughout (a normal sample scores
about 0); published daily-return tables are consistent with that
convention even when they label the column plainly "Kurt.". The
Kolmogorov-Smirnov p-value uses the asymptotic distribution with mean and
standard deviation estimated from the sample; no small-sample (Lilliefors)
correction is applied.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats
from statsmodels.tsa.stattools import adfuller

from .timeseries import DataError, DatedSeries


@dataclass(frozen=True)
class SummaryStats:
    n: int
    min: float
    max: float
    mean: float
    sd: float
    skewness: float
    excess_kurtosis: float

    def to_dict(self) -> dict:
        return {
            "obs": self.n, "min": self.min, "max": self.max, "mean": self.mean,
            "sd": self.sd, "skew": self.skewness, "kurt": self.excess_kurtosis,
        }


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float
    lags_or_order: int | None = None
    critical_values: dict[str, float] | None = None


def _values(s) -> np.ndarray:
    return s.values if isinstance(s, DatedSeries) else np.asarray(s, dtype=np.float64)


def _moments(x: np.ndarray) -> tuple[float, float, float, float]:
    """(mean, sd with n-1, skewness, excess kurtosis) via central moments."""
    n = len(x)
    mean = x.mean()
    d = x - mean
    m2 = np.mean(d ** 2)
    if m2 == 0.0:
        raise DataError("series has zero variance")
    m3 = np.mean(d ** 3)
    m4 = np.mean(d ** 4)
    sd = np.sqrt(d @ d / (n - 1))
    return float(mean), float(sd), float(m3 / m2 ** 1.5), float(m4 / m2 ** 2 - 3.0)


def describe(s) -> SummaryStats:
    x = _values(s)
    if len(x) < 2:
        raise DataError("describe needs at least 2 observations")
    mean, sd, skew, exkurt = _moments(x)
    return SummaryStats(len(x), float(x.min()), float(x.max()), mean, sd, skew, exkurt)


def jarque_bera(s) -> TestResult:
    """Skewness/kurtosis normality test against chi-square(2)."""
    x = _values(s)
    if len(x) < 4:
        raise DataError("jarque_bera needs at least 4 observations")
    n = len(x)
    _, _, skew, exkurt = _moments(x)
    stat = n * (skew ** 2 / 6.0 + exkurt ** 2 / 24.0)
    return TestResult(float(stat), float(stats.chi2.sf(stat, 2)))


def ks_normal(s) -> TestResult:
    """Kolmogorov-Smirnov test against N(mean, sd) with estimated moments."""
    x = _values(s)
    if len(x) < 2:
        raise DataError("ks_normal needs at least 2 observations")
    mean, sd, _, _ = _moments(x)
    res = stats.kstest(x, "norm", args=(mean, sd), mode="asymp")
    return TestResult(float(res.statistic), float(res.pvalue))


def _autocorrelations(x: np.ndarray, lags: int) -> np.ndarray:
    d = x - x.mean()
    denom = d @ d
    if denom == 0.0:
        raise DataError("series has zero variance")
    return np.array([d[k:] @ d[:-k] / denom for k in range(1, lags + 1)])


def ljung_box(s, lags: int = 20) -> TestResult:
    """Portmanteau test for autocorrelation up to the given lag."""
    x = _values(s)
    n = len(x)
    if n <= lags + 1:
        raise DataError(f"ljung_box needs more than {lags + 1} observations")
    acf = _autocorrelations(x, lags)
    k = np.arange(1, lags + 1)
    stat = n * (n + 2) * np.sum(acf ** 2 / (n - k))
    return TestResult(float(stat), float(stats.chi2.sf(stat, lags)), lags)


def arch_lm(s, lags: int = 20) -> TestResult:
    """Engle's LM test: T*R^2 from regressing x^2 on its own lags."""
    x = _values(s)
    n = len(x)
    if n <= lags + 1:
        raise DataError(f"arch_lm needs more than {lags + 1} observations")
    x2 = x ** 2
    y = x2[lags:]
    X = np.column_stack([np.ones(n - lags)] + [x2[lags - k:n - k] for k in range(1, lags + 1)])
    coef, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    if rank < X.shape[1]:
        raise DataError("singular design in arch_lm (constant series?)")
    resid = y - X @ coef
    tss = np.sum((y - y.mean()) ** 2)
    if tss == 0.0:
        raise DataError("series has zero variance")
    r2 = 1.0 - np.sum(resid ** 2) / tss
    stat = (n - lags) * r2
    return TestResult(float(stat), float(stats.chi2.sf(stat, lags)), lags)


def adf_test(s, regression: str = "c") -> TestResult:
    """Augmented Dickey-Fuller unit-root test.

    Lag order is chosen by BIC up to floor(12*(n/100)^0.25). The default
    deterministic term is a constant ("c"), whose 1% critical value at
    n ~ 5000 is -3.4317; pass "ct" to add a linear trend.
    """
    x = _values(s)
    if len(x) < 25:
        raise DataError("adf_test needs at least 25 observations")
    stat, pvalue, usedlag, _, crit, _ = adfuller(x, regression=regression, autolag="BIC")
    return TestResult(float(stat), float(pvalue), int(usedlag),
                      {k: float(v) for k, v in crit.items()})


def spearman(a, b) -> float:
    """Rank correlation with average ranks for ties."""
    xa, xb = _values(a), _values(b)
    if len(xa) != len(xb):
        raise DataError("spearman needs equal-length series")
    if len(xa) < 3:
        raise DataError("spearman needs at least 3 observations")
    return float(stats.spearmanr(xa, xb).statistic)


def _ar_bic(x: np.ndarray, max_p: int) -> int:
    """BIC-minimizing AR order on a common effective sample."""
    n = len(x)
    y = x[max_p:]
    n_eff = n - max_p
    best_p, best_bic = 1, np.inf
    for p in range(1, max_p + 1):
        X = np.column_stack([np.ones(n_eff)] + [x[max_p - k:n - k] for k in range(1, p + 1)])
        coef, _, _, _ = np.linalg.lstsq(X, y, rcond=None)
        ssr = np.sum((y - X @ coef) ** 2)
        bic = n_eff * np.log(ssr / n_eff) + (p + 1) * np.log(n_eff)
        if bic < best_bic:
            best_p, best_bic = p, bic
    return best_p


def ar_residual_volatility(s: DatedSeries, p: int | None = None) -> DatedSeries:
    """Squared least-squares AR(p) residuals as a volatility proxy.

    The autoregression includes an intercept, so p = 0 degenerates to
    squared deviations from the mean. With p None the order minimizing
    BIC over 1..4 is used. Output aligns to dates p+1..n.
    """
    x = s.values
    n = len(x)
    if p is None:
        if n < 30:
            raise DataError("too short to select an AR order")
        p = _ar_bic(x, 4)
    if p < 0 or n <= p + 1:
        raise DataError(f"ar_residual_volatility needs n > p + 1 (n={n}, p={p})")
    if np.ptp(x) == 0.0:
        raise DataError("constant series: singular AR design")
    if p == 0:
        resid = x - x.mean()
        return DatedSeries(s.dates, resid ** 2, s.frequency, s.name + "_vol")
    X = np.column_stack([np.ones(n - p)] + [x[p - k:n - k] for k in range(1, p + 1)])
    y = x[p:]
    coef, _, _, _ = np.linalg.lstsq(X, y, rcond=None)
    resid = y - X @ coef
    return DatedSeries(s.dates[p:], resid ** 2, s.frequency, s.name + "_vol")
