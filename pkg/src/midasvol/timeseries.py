"""Dated series ingestion and mixed-frequency panel construction.

A :class:`DatedSeries` is an immutable (date, value) sequence at daily or
monthly frequency. :func:`build_panel` aligns a daily return series with
low-frequency covariates into a :class:`MixedPanel`, the input every model
in this package consumes. Monthly covariate values are held constant
across the business days of their month; daily covariates keep their own
day-level lag indexing.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

DAILY = "daily"
MONTHLY = "monthly"


class DataError(ValueError):
    """Raised for malformed or inconsistent input data."""


def _readonly(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, copy=True)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class DatedSeries:
    """Ordered (date, value) observations at daily or monthly frequency."""

    dates: np.ndarray  # datetime64[D], strictly increasing
    values: np.ndarray  # float64, finite
    frequency: str = DAILY
    name: str = ""
    n_dropped: int = 0  # rows removed during ingestion

    def __post_init__(self):
        dates = np.asarray(self.dates, dtype="datetime64[D]")
        values = np.asarray(self.values, dtype=np.float64)
        if dates.shape != values.shape or dates.ndim != 1:
            raise DataError("dates and values must be 1-d arrays of equal length")
        if len(dates) == 0:
            raise DataError("series is empty")
        if np.any(dates[1:] <= dates[:-1]):
            i = int(np.argmax(dates[1:] <= dates[:-1]))
            raise DataError(f"dates not strictly increasing at {dates[i + 1]}")
        if not np.all(np.isfinite(values)):
            i = int(np.argmax(~np.isfinite(values)))
            raise DataError(f"non-finite value at {dates[i]}")
        if self.frequency not in (DAILY, MONTHLY):
            raise DataError(f"unknown frequency {self.frequency!r}")
        if self.frequency == MONTHLY:
            months = dates.astype("datetime64[M]")
            if len(np.unique(months)) != len(months):
                raise DataError("monthly series has more than one observation in a month")
        object.__setattr__(self, "dates", _readonly(dates))
        object.__setattr__(self, "values", _readonly(values))

    def __len__(self) -> int:
        return len(self.values)

    def with_name(self, name: str) -> "DatedSeries":
        return DatedSeries(self.dates, self.values, self.frequency, name, self.n_dropped)


def _infer_frequency(dates: np.ndarray) -> str:
    if len(dates) < 2:
        return DAILY
    months = dates.astype("datetime64[M]")
    gaps = np.diff(dates).astype(int)
    if len(np.unique(months)) == len(months) and np.median(gaps) >= 25:
        return MONTHLY
    return DAILY


def load_csv(path, date_column: str, value_column: str, frequency: str | None = None,
             name: str | None = None) -> DatedSeries:
    """Read a two-column (date, value) series from a CSV file.

    Dates must be ISO-8601 (YYYY-MM-DD). Rows with an empty or non-finite
    value are dropped and counted in ``n_dropped``. Extra columns are
    ignored. Frequency is inferred from date spacing unless given.
    """
    rows = []
    n_dropped = 0
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    with fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise DataError(f"{path}: missing header row")
        for col in (date_column, value_column):
            if col not in reader.fieldnames:
                raise DataError(f"{path}: no column named {col!r}")
        for i, row in enumerate(reader, start=2):  # header is line 1
            raw_date = (row[date_column] or "").strip()
            raw_value = (row[value_column] or "").strip()
            if raw_value == "":
                n_dropped += 1
                continue
            try:
                date = np.datetime64(raw_date, "D")
            except ValueError as exc:
                raise DataError(f"{path} line {i}: bad date {raw_date!r}") from exc
            try:
                value = float(raw_value)
            except ValueError as exc:
                raise DataError(f"{path} line {i}: bad number {raw_value!r}") from exc
            if not math.isfinite(value):
                n_dropped += 1
                continue
            rows.append((date, value))
    if not rows:
        raise DataError(f"{path}: no usable rows")
    rows.sort(key=lambda r: r[0])
    dates = np.array([r[0] for r in rows], dtype="datetime64[D]")
    values = np.array([r[1] for r in rows])
    dup = np.flatnonzero(dates[1:] == dates[:-1])
    if dup.size:
        raise DataError(f"{path}: duplicate date {dates[dup[0] + 1]}")
    freq = frequency or _infer_frequency(dates)
    return DatedSeries(dates, values, freq, name or str(value_column), n_dropped)


def log_diff(s: DatedSeries) -> DatedSeries:
    """First difference of the natural log; dates shift to the later day."""
    if len(s) < 2:
        raise DataError("log_diff needs at least 2 observations")
    if np.any(s.values <= 0):
        i = int(np.argmax(s.values <= 0))
        raise DataError(f"non-positive value at {s.dates[i]}; cannot log-difference")
    logs = np.log(s.values)
    return DatedSeries(s.dates[1:], np.diff(logs), s.frequency, s.name, s.n_dropped)


def first_diff(s: DatedSeries) -> DatedSeries:
    """Plain first difference; dates shift to the later day."""
    if len(s) < 2:
        raise DataError("first_diff needs at least 2 observations")
    return DatedSeries(s.dates[1:], np.diff(s.values), s.frequency, s.name, s.n_dropped)


def intersect_calendars(a: DatedSeries, b: DatedSeries) -> tuple[DatedSeries, DatedSeries]:
    """Restrict two daily series to their common trading days."""
    if a.frequency != DAILY or b.frequency != DAILY:
        raise DataError("intersect_calendars requires two daily series")
    common = np.intersect1d(a.dates, b.dates)
    if common.size == 0:
        raise DataError("calendars have no common dates")
    ia = np.searchsorted(a.dates, common)
    ib = np.searchsorted(b.dates, common)
    return (
        DatedSeries(common, a.values[ia], DAILY, a.name, a.n_dropped),
        DatedSeries(common, b.values[ib], DAILY, b.name, b.n_dropped),
    )


@dataclass(frozen=True)
class PanelCovariate:
    """One low-frequency regressor aligned to the panel.

    ``values`` holds one value per period on the covariate's own grid
    (months for monthly series, panel days for daily series), oldest
    first. The first ``n_pre`` entries precede the panel start and are
    usable as lag history only.
    """

    name: str
    values: np.ndarray
    lag: int  # filter length K
    frequency: str
    n_pre: int = 0

    def __post_init__(self):
        if self.lag < 1:
            raise DataError(f"covariate {self.name!r}: lag must be >= 1")
        object.__setattr__(self, "values", _readonly(np.asarray(self.values, dtype=np.float64)))

    def n_periods(self) -> int:
        """Periods inside the panel span (excludes pre-history)."""
        return len(self.values) - self.n_pre

    def first_feasible_period(self) -> int:
        """First in-panel period index with a complete lag window."""
        return max(0, self.lag - self.n_pre)


@dataclass(frozen=True)
class MixedPanel:
    """Daily returns with per-day month indexing and aligned covariates."""

    day_dates: np.ndarray  # datetime64[D]
    returns: np.ndarray  # float64
    month_index: np.ndarray  # int64, 0-based month ordinal per day
    period_lengths: np.ndarray  # int64, business days per month
    covariates: tuple[PanelCovariate, ...] = ()
    n_dropped_days: int = 0

    def __post_init__(self):
        day_dates = np.asarray(self.day_dates, dtype="datetime64[D]")
        returns = np.asarray(self.returns, dtype=np.float64)
        month_index = np.asarray(self.month_index, dtype=np.int64)
        period_lengths = np.asarray(self.period_lengths, dtype=np.int64)
        if not (len(day_dates) == len(returns) == len(month_index)):
            raise DataError("panel arrays must have equal length")
        if int(period_lengths.sum()) != len(day_dates):
            raise DataError("period_lengths must sum to the number of days")
        for cov in self.covariates:
            needed = self.n_periods if cov.frequency == MONTHLY else self.n_days
            if cov.n_periods() != needed:
                raise DataError(
                    f"covariate {cov.name!r} covers {cov.n_periods()} periods, panel has {needed}"
                )
        object.__setattr__(self, "day_dates", _readonly(day_dates))
        object.__setattr__(self, "returns", _readonly(returns))
        object.__setattr__(self, "month_index", _readonly(month_index))
        object.__setattr__(self, "period_lengths", _readonly(period_lengths))

    @property
    def n_days(self) -> int:
        return len(self.returns)

    @property
    def n_periods(self) -> int:
        return len(self.period_lengths)

    def covariate(self, name: str) -> PanelCovariate:
        for cov in self.covariates:
            if cov.name == name:
                return cov
        raise KeyError(name)


def _month_structure(day_dates: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    months = day_dates.astype("datetime64[M]")
    uniq, month_index, counts = np.unique(months, return_inverse=True, return_counts=True)
    return uniq, month_index.astype(np.int64), counts.astype(np.int64)


def _align_monthly_covariate(cov: DatedSeries, lag: int, panel_months: np.ndarray) -> PanelCovariate:
    cov_months = cov.dates.astype("datetime64[M]")
    first, last = panel_months[0], panel_months[-1]
    # pre-history: up to `lag` months immediately before the panel start
    start = first - min(lag, int((first - cov_months[0]).astype(int))) if cov_months[0] < first else first
    wanted = np.arange(start, last + 1)
    pos = np.searchsorted(cov_months, wanted)
    missing = (pos >= len(cov_months)) | (cov_months[np.minimum(pos, len(cov_months) - 1)] != wanted)
    if np.any(missing):
        raise DataError(f"covariate {cov.name!r}: no value for month {wanted[np.argmax(missing)]}")
    n_pre = int(first - start)
    return PanelCovariate(cov.name, cov.values[pos], lag, MONTHLY, n_pre)


def _align_daily_covariate(cov: DatedSeries, lag: int, day_dates: np.ndarray) -> PanelCovariate:
    missing = np.setdiff1d(day_dates, cov.dates)
    if missing.size:
        raise DataError(f"covariate {cov.name!r}: no value on {missing[0]}")
    start = int(np.searchsorted(cov.dates, day_dates[0]))
    n_pre = min(lag, start)
    in_panel = np.searchsorted(cov.dates, day_dates)
    values = np.concatenate([cov.values[start - n_pre:start], cov.values[in_panel]])
    return PanelCovariate(cov.name, values, lag, DAILY, n_pre)


def build_panel(returns: DatedSeries,
                covariates: list[tuple[DatedSeries, int]] | None = None) -> MixedPanel:
    """Assemble the mixed-frequency panel.

    Daily covariates restrict the panel to the intersection of trading
    calendars (dropped day count recorded on the panel). Monthly
    covariates must cover every panel month; any history in the months
    before the panel start (up to K) is kept as lag pre-history, which
    shortens the burn-in models need.
    """
    if returns.frequency != DAILY:
        raise DataError("returns must be a daily series")
    covariates = covariates or []
    day_dates = returns.dates
    for cov, _lag in covariates:
        if cov.frequency == DAILY:
            day_dates = np.intersect1d(day_dates, cov.dates)
    if day_dates.size == 0:
        raise DataError("no common trading days between returns and daily covariates")
    n_dropped = len(returns.dates) - len(day_dates)
    ret_values = returns.values[np.searchsorted(returns.dates, day_dates)]
    panel_months, month_index, period_lengths = _month_structure(day_dates)

    aligned = []
    for cov, lag in covariates:
        if not cov.name:
            raise DataError("covariates must be named")
        if cov.frequency == MONTHLY:
            aligned.append(_align_monthly_covariate(cov, lag, panel_months))
        else:
            aligned.append(_align_daily_covariate(cov, lag, day_dates))
    for pc in aligned:
        total = len(pc.values)
        if total <= pc.lag:
            raise DataError(
                f"covariate {pc.name!r}: only {total} periods of history for lag {pc.lag}"
            )
    return MixedPanel(day_dates, ret_values, month_index, period_lengths,
                      tuple(aligned), n_dropped)


def realized_volatility(panel: MixedPanel) -> DatedSeries:
    """Sum of squared daily returns per month, dated at each month's last day."""
    if panel.n_periods < 1:
        raise DataError("panel has no complete period")
    rv = np.bincount(panel.month_index, weights=panel.returns ** 2,
                     minlength=panel.n_periods)
    last_day = np.empty(panel.n_periods, dtype="datetime64[D]")
    last_day[panel.month_index] = panel.day_dates  # ascending: last write wins
    return DatedSeries(last_day, rv, MONTHLY, "rv")
