"""Time-series and histogram containers plus moment and correlation estimators.

All estimators use the population convention (divisor ``n``). Kurtosis is
reported in its non-excess form, so a Gaussian has kurtosis 3.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from typing import Optional, Union

import numpy as np
from scipy import fft as sp_fft

from .errors import DegenerateDataError, ValidationError

__all__ = [
    "TimeSeries",
    "Histogram",
    "MomentSummary",
    "as_values",
    "moments",
    "make_histogram",
    "autocorrelation",
]

_EPOCH = datetime(1970, 1, 1, tzinfo=timezone.utc)


def _to_utc(ts: datetime) -> datetime:
    if ts.tzinfo is None:
        return ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def _to_timedelta(resolution) -> timedelta:
    if isinstance(resolution, timedelta):
        return resolution
    return timedelta(minutes=float(resolution))


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Uniformly sampled real-valued series.

    Parameters
    ----------
    values : array_like
        Finite samples; copied and frozen.
    resolution : timedelta or float
        Sampling step. Plain numbers are interpreted as minutes.
    start : datetime, optional
        Timestamp of the first sample. Naive datetimes are taken as UTC.
    label : str, optional
        Free-text description.

    Notes
    -----
    Timestamps are implicit, ``t_i = start + i * resolution``.
    """

    values: np.ndarray
    resolution: timedelta = timedelta(hours=1)
    start: datetime = _EPOCH
    label: str = ""

    def __post_init__(self):
        v = np.array(self.values, dtype=float, copy=True).ravel()
        if v.size == 0:
            raise ValidationError("time series must be non-empty")
        if not np.all(np.isfinite(v)):
            bad = int(np.flatnonzero(~np.isfinite(v))[0])
            raise ValidationError(f"time series contains non-finite value at index {bad}")
        v.setflags(write=False)
        res = _to_timedelta(self.resolution)
        if res <= timedelta(0):
            raise ValidationError("resolution must be positive")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "resolution", res)
        object.__setattr__(self, "start", _to_utc(self.start))

    def __len__(self) -> int:
        return self.values.size

    @property
    def resolution_minutes(self) -> float:
        return self.resolution.total_seconds() / 60.0

    @property
    def resolution_hours(self) -> float:
        return self.resolution.total_seconds() / 3600.0

    @property
    def duration_hours(self) -> float:
        return len(self) * self.resolution_hours

    @property
    def end(self) -> datetime:
        """Timestamp of the last sample."""
        return self.start + (len(self) - 1) * self.resolution

    def timestamps(self) -> list[datetime]:
        return [self.start + i * self.resolution for i in range(len(self))]

    def samples(self, hours: float) -> float:
        """Convert a duration in hours to a (fractional) number of samples."""
        return hours / self.resolution_hours

    def with_values(self, values, label: Optional[str] = None) -> "TimeSeries":
        """Copy with the same time axis and new values."""
        return TimeSeries(values, self.resolution, self.start,
                          self.label if label is None else label)

    def slice(self, i0: int, i1: int) -> "TimeSeries":
        """Sub-series of samples ``i0 <= i < i1`` with the start shifted accordingly."""
        return TimeSeries(self.values[i0:i1], self.resolution,
                          self.start + i0 * self.resolution, self.label)


SeriesLike = Union[TimeSeries, np.ndarray, list, tuple]


def as_values(series: SeriesLike) -> np.ndarray:
    """Return the sample array of a TimeSeries or array-like as float64."""
    if isinstance(series, TimeSeries):
        return series.values
    return np.asarray(series, dtype=float).ravel()


@dataclass(frozen=True, eq=False)
class Histogram:
    """Density-normalised histogram.

    Attributes
    ----------
    bin_edges : ndarray
        ``n + 1`` strictly increasing edges.
    densities : ndarray
        ``n`` non-negative densities with ``sum(densities * widths) == 1``.
    normalization : float
        Number of samples that fell inside the edges.
    """

    bin_edges: np.ndarray
    densities: np.ndarray
    normalization: float

    def __post_init__(self):
        e = np.array(self.bin_edges, dtype=float)
        d = np.array(self.densities, dtype=float)
        if e.ndim != 1 or d.ndim != 1 or e.size != d.size + 1:
            raise ValidationError("histogram needs n+1 edges for n densities")
        if np.any(np.diff(e) <= 0):
            raise ValidationError("histogram edges must be strictly increasing")
        if np.any(d < 0) or not np.all(np.isfinite(d)):
            raise ValidationError("histogram densities must be finite and non-negative")
        e.setflags(write=False)
        d.setflags(write=False)
        object.__setattr__(self, "bin_edges", e)
        object.__setattr__(self, "densities", d)

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[1:] + self.bin_edges[:-1])

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.bin_edges)

    def integral(self) -> float:
        return float(np.sum(self.densities * self.widths))


@dataclass(frozen=True)
class MomentSummary:
    """First four moments of a sample.

    ``skewness`` is None when ``std == 0``; ``kurtosis`` is None when
    ``std == 0`` or ``count < 4``.
    """

    mean: float
    std: float
    skewness: Optional[float]
    kurtosis: Optional[float]
    count: int

    def to_dict(self) -> dict:
        return {"mean": self.mean, "std": self.std, "skewness": self.skewness,
                "kurtosis": self.kurtosis, "count": self.count}


def moments(series: SeriesLike) -> MomentSummary:
    """Mean, standard deviation, skewness and kurtosis (population convention).

    Parameters
    ----------
    series : TimeSeries or array_like
        Non-empty finite sample.

    Returns
    -------
    MomentSummary
        Skewness is ``m3 / m2**1.5`` and kurtosis ``m4 / m2**2`` with central
        moments ``m_k = mean((x - mean(x))**k)``.
    """
    x = as_values(series)
    if x.size == 0:
        raise ValidationError("moments of an empty sample")
    if not np.all(np.isfinite(x)):
        raise ValidationError("moments require finite values")
    n = x.size
    mu = float(np.mean(x))
    d = x - mu
    m2 = float(np.mean(d * d))
    std = float(np.sqrt(m2))
    # rounding can leave a tiny m2 for constant input
    if m2 == 0.0 or np.all(x == x[0]):
        return MomentSummary(mu, 0.0, None, None, n)
    # standardise first so tiny variances do not underflow
    z = d / std
    skew = float(np.mean(z ** 3))
    kurt = float(np.mean(z ** 4)) if n >= 4 else None
    return MomentSummary(mu, std, skew, kurt, n)


def make_histogram(series: SeriesLike, bins: int = 201,
                   range: Optional[tuple[float, float]] = None) -> Histogram:
    """Density-normalised histogram.

    Parameters
    ----------
    series : TimeSeries or array_like
    bins : int
        Number of equal-width bins, at least 2.
    range : (float, float), optional
        Histogram support. Defaults to ``[min, max]`` of the data. Samples
        outside the range are ignored and the densities are normalised over
        the samples inside it.

    Raises
    ------
    DegenerateDataError
        All values equal and no range given, or no sample inside ``range``.
    """
    x = as_values(series)
    if int(bins) != bins or bins < 2:
        raise ValidationError("bins must be an integer >= 2")
    bins = int(bins)
    if range is None:
        lo, hi = float(np.min(x)), float(np.max(x))
        if not hi > lo:
            raise DegenerateDataError("degenerate support: all values are equal")
    else:
        lo, hi = float(range[0]), float(range[1])
        if not hi > lo:
            raise ValidationError("histogram range must satisfy lo < hi")
    counts, edges = np.histogram(x, bins=bins, range=(lo, hi))
    total = counts.sum()
    if total == 0:
        raise DegenerateDataError("degenerate support: no sample inside the histogram range")
    dens = counts / (total * np.diff(edges))
    return Histogram(edges, dens, float(total))


def _lag_to_samples(series: TimeSeries, max_lag_hours: float) -> int:
    k = int(np.floor(series.samples(max_lag_hours) + 1e-9))
    return k


def autocorrelation(series: TimeSeries, max_lag: float) -> tuple[np.ndarray, np.ndarray]:
    """Normalised autocorrelation C(lag)/C(0) by FFT.

    Parameters
    ----------
    series : TimeSeries
    max_lag : float
        Largest lag in hours; must be shorter than the series duration.

    Returns
    -------
    lags : ndarray
        Lags in hours, ``0, dt, 2 dt, ...`` up to ``max_lag``.
    acf : ndarray
        Biased estimator ``sum_i d_i d_{i+k} / sum_i d_i**2`` with ``d`` the
        demeaned series; ``acf[0] == 1``.
    """
    if not isinstance(series, TimeSeries):
        series = TimeSeries(series)
    x = series.values
    n = x.size
    if not 0 <= max_lag < series.duration_hours:
        raise ValidationError("max_lag must be non-negative and shorter than the series duration")
    kmax = min(_lag_to_samples(series, max_lag), n - 1)
    d = x - x.mean()
    c0 = float(np.dot(d, d))
    if c0 == 0.0 or np.all(x == x[0]):
        raise DegenerateDataError("zero-variance series")
    nfft = sp_fft.next_fast_len(2 * n - 1, real=True)
    spec = sp_fft.rfft(d, nfft)
    acov = sp_fft.irfft(spec.real ** 2 + spec.imag ** 2, nfft)[: kmax + 1]
    acf = acov / acov[0]
    acf[0] = 1.0
    lags = np.arange(kmax + 1) * series.resolution_hours
    return lags, acf
