"""Price statistics conditioned on circulation weather types and flow strength."""
from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timedelta
from typing import Optional, Sequence, Union

import numpy as np
from scipy.stats import linregress

from .core import MomentSummary, TimeSeries, _to_timedelta, _to_utc, moments
from .errors import DegenerateDataError, ValidationError

__all__ = [
    "WEATHER_TYPES",
    "WeatherSeries",
    "JoinedSeries",
    "ConditionalStats",
    "MeritOrderFit",
    "align",
    "f_bin_edges",
    "condition_on_f",
    "cwt_segments",
    "pooled_summary",
    "merit_order_fit",
]

WEATHER_TYPES = ("N", "NE", "E", "SE", "S", "SW", "W", "NW",
                 "Cyclonic", "Anticyclonic", "Mixed")
LOW_COUNT = 100
HIGH_PRICE_SIGMAS = 3.0


@dataclass(frozen=True, eq=False)
class WeatherSeries:
    """Flow strength and circulation type on a uniform time grid."""

    f_param: np.ndarray
    cwt: np.ndarray
    resolution: timedelta = timedelta(hours=1)
    start: datetime = datetime(1970, 1, 1)

    def __post_init__(self):
        f = np.array(self.f_param, dtype=float).ravel()
        c = np.array(self.cwt, dtype=object).ravel()
        if f.size == 0 or f.size != c.size:
            raise ValidationError("weather series needs equal, non-zero numbers of f and cwt values")
        if not np.all(np.isfinite(f)):
            raise ValidationError("f_param must be finite")
        if np.any(f < 0):
            raise ValidationError(f"f_param must be non-negative (index {int(np.argmax(f < 0))})")
        unknown = sorted(set(c) - set(WEATHER_TYPES))
        if unknown:
            raise ValidationError(f"unknown weather type {unknown[0]!r}")
        res = _to_timedelta(self.resolution)
        if res <= timedelta(0):
            raise ValidationError("resolution must be positive")
        f.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "f_param", f)
        object.__setattr__(self, "cwt", c)
        object.__setattr__(self, "resolution", res)
        object.__setattr__(self, "start", _to_utc(self.start))

    def __len__(self):
        return self.f_param.size


@dataclass(frozen=True, eq=False)
class JoinedSeries:
    """Price samples paired with the weather sample covering each timestamp.

    ``price_index`` indexes the original price series; ``dropped_before`` and
    ``dropped_after`` count price samples outside the weather coverage.
    """

    price: TimeSeries
    price_index: np.ndarray
    f_param: np.ndarray
    cwt: np.ndarray
    dropped_before: int
    dropped_after: int

    def __len__(self):
        return self.price_index.size


def align(price: TimeSeries, weather: WeatherSeries) -> JoinedSeries:
    """Step-function alignment of weather samples onto the price grid.

    Weather sample ``j`` covers ``[start_w + j res_w, start_w + (j+1) res_w)``.

    Raises
    ------
    ValidationError
        Weather is finer than the prices, or the ranges do not overlap.
    """
    if weather.resolution < price.resolution:
        raise ValidationError("weather resolution must not be finer than the price resolution")
    n = len(price)
    offs = np.array([(price.start - weather.start).total_seconds()]) + \
        np.arange(n) * price.resolution.total_seconds()
    j = np.floor(offs / weather.resolution.total_seconds()).astype(np.int64)
    ok = (j >= 0) & (j < len(weather))
    if not np.any(ok):
        raise ValidationError("price and weather series do not overlap")
    idx = np.flatnonzero(ok)
    before = int(idx[0])
    after = int(n - 1 - idx[-1])
    sub = price.slice(idx[0], idx[-1] + 1)
    return JoinedSeries(sub, idx, weather.f_param[j[ok]], weather.cwt[j[ok]], before, after)


@dataclass(frozen=True)
class ConditionalStats:
    """Statistics of one conditioning class.

    ``negative_count`` and ``high_price_count`` count samples of the raw
    price; multiply by the resolution for hours.
    """

    label: str
    bin: Optional[tuple]
    moments: MomentSummary
    negative_count: int
    high_price_count: int
    sample_count: int
    low_count: bool
    start_index: Optional[int] = None

    def to_dict(self) -> dict:
        d = {"label": self.label, "bin": None if self.bin is None else list(self.bin),
             "sample_count": self.sample_count, "negative_count": self.negative_count,
             "high_price_count": self.high_price_count, "low_count": self.low_count}
        d.update(self.moments.to_dict())
        if self.start_index is not None:
            d["start_index"] = self.start_index
        return d


def f_bin_edges(f, bins: Union[int, Sequence[float]] = 10) -> np.ndarray:
    """Bin edges for the flow strength.

    An integer gives equal-count (quantile) bins spanning the observed range;
    a sequence is taken as explicit edges and sorted.
    """
    f = np.asarray(f, dtype=float)
    if np.ndim(bins) == 0:
        k = int(bins)
        if k < 2:
            raise ValidationError("need at least 2 f bins")
        edges = np.unique(np.quantile(f, np.linspace(0.0, 1.0, k + 1)))
    else:
        edges = np.unique(np.asarray(bins, dtype=float))
        if edges.size < 3:
            raise ValidationError("need at least 2 f bins (3 distinct edges)")
    if edges.size < 2:
        raise DegenerateDataError("f_param has no spread")
    return edges


def _check_grid(joined: JoinedSeries, series: TimeSeries, name: str):
    if series.resolution != joined.price.resolution:
        raise ValidationError(f"{name} series must share the price resolution")
    shift = (joined.price.start - series.start) / series.resolution
    if shift != int(shift):
        raise ValidationError(f"{name} series is not on the price grid")
    idx = int(shift) + np.arange(len(joined))
    if idx[0] < 0 or idx[-1] >= len(series):
        raise ValidationError(f"{name} series does not cover the joined range")
    return series.values[idx]


def _stats(label, bin_, det, raw, thr, start=None, drop_kurtosis=False):
    m = moments(det) if det.size else MomentSummary(float("nan"), float("nan"), None, None, 0)
    if drop_kurtosis:
        m = MomentSummary(m.mean, m.std, m.skewness, None, m.count)
    return ConditionalStats(label, bin_, m, int(np.count_nonzero(raw < 0)),
                            int(np.count_nonzero(raw > thr)), int(det.size),
                            det.size < LOW_COUNT, start)


def condition_on_f(joined: JoinedSeries, detrended: TimeSeries, raw: TimeSeries,
                   bins: Union[int, Sequence[float]] = 10) -> list[ConditionalStats]:
    """Price statistics per flow-strength bin.

    Parameters
    ----------
    joined : JoinedSeries
    detrended, raw : TimeSeries
        Detrended and raw prices on the same grid as ``joined.price``.
    bins : int or sequence of float
        Number of equal-count bins, or explicit edges.

    Returns
    -------
    list of ConditionalStats
        Moments of the detrended price, plus counts of negative raw prices and
        raw prices above ``mean + 3 std`` of the whole raw series. Bins are
        half-open ``[lo, hi)`` except the last, which includes ``hi``;
        samples outside explicit edges fall in no bin. Bins with fewer than
        100 samples are flagged.
    """
    det = _check_grid(joined, detrended, "detrended")
    rv = _check_grid(joined, raw, "raw")
    thr = float(np.mean(raw.values) + HIGH_PRICE_SIGMAS * np.std(raw.values))
    edges = f_bin_edges(joined.f_param, bins)
    f = joined.f_param
    k = np.searchsorted(edges, f, side="right") - 1
    k[f == edges[-1]] = edges.size - 2
    out = []
    for b in range(edges.size - 1):
        m = k == b
        out.append(_stats(f"f[{edges[b]:.6g},{edges[b + 1]:.6g}]", (float(edges[b]), float(edges[b + 1])),
                          det[m], rv[m], thr))
    return out


def _runs(mask):
    """Start and length of each maximal run of True."""
    d = np.diff(np.concatenate([[0], mask.astype(np.int8), [0]]))
    starts = np.flatnonzero(d == 1)
    ends = np.flatnonzero(d == -1)
    return starts, ends - starts


def cwt_segments(joined: JoinedSeries, detrended: TimeSeries, label: str,
                 min_persistence: float = 12.0, raw: Optional[TimeSeries] = None):
    """Statistics of every persistent run of one weather type.

    Parameters
    ----------
    joined : JoinedSeries
    detrended : TimeSeries
    label : str
        One of :data:`WEATHER_TYPES`.
    min_persistence : float
        Minimum run duration in hours; runs lasting at least this long are
        kept, so ``0`` keeps every run.
    raw : TimeSeries, optional
        Raw prices for the negative and high-price counts.

    Returns
    -------
    segments : list of ConditionalStats
        One entry per run, without kurtosis.
    pooled : ConditionalStats or None
        Statistics over all qualifying samples; None without segments.
    """
    if label not in WEATHER_TYPES:
        raise ValidationError(f"unknown weather type {label!r}")
    if min_persistence < 0:
        raise ValidationError("min_persistence must be non-negative")
    det = _check_grid(joined, detrended, "detrended")
    if raw is not None:
        rv = _check_grid(joined, raw, "raw")
        thr = float(np.mean(raw.values) + HIGH_PRICE_SIGMAS * np.std(raw.values))
    else:
        rv, thr = np.full(det.size, np.nan), np.inf
    res_h = joined.price.resolution_hours
    starts, lengths = _runs(joined.cwt == label)
    keep = lengths * res_h >= min_persistence - 1e-9
    segs, pool = [], []
    for s0, ln in zip(starts[keep], lengths[keep]):
        sl = slice(s0, s0 + ln)
        segs.append(_stats(label, None, det[sl], rv[sl], thr, int(s0), drop_kurtosis=True))
        pool.append(np.arange(s0, s0 + ln))
    if not segs:
        return [], None
    idx = np.concatenate(pool)
    pooled = _stats(label, None, det[idx], rv[idx], thr, None, drop_kurtosis=True)
    return segs, pooled


def pooled_summary(joined: JoinedSeries, detrended: TimeSeries, label: str) -> MomentSummary:
    """Moments of the detrended price over every sample with the given type."""
    det = _check_grid(joined, detrended, "detrended")
    return moments(det[joined.cwt == label])


@dataclass(frozen=True, eq=False)
class MeritOrderFit:
    """Least-squares line of price against residual load, with a joint histogram."""

    slope: float
    intercept: float
    slope_stderr: float
    intercept_stderr: float
    rvalue: float
    counts: np.ndarray
    load_edges: np.ndarray
    price_edges: np.ndarray

    @property
    def log_density(self) -> np.ndarray:
        area = np.outer(np.diff(self.load_edges), np.diff(self.price_edges))
        dens = self.counts / (self.counts.sum() * area)
        with np.errstate(divide="ignore"):
            return np.where(dens > 0, np.log10(dens), np.nan)


def merit_order_fit(raw_price: TimeSeries, residual_load: TimeSeries,
                    bins: Union[int, tuple] = 100) -> MeritOrderFit:
    """Ordinary least squares of price on residual load.

    Both series must share start, resolution and length (at least 100).
    """
    p = raw_price.values if isinstance(raw_price, TimeSeries) else np.asarray(raw_price, float)
    r = residual_load.values if isinstance(residual_load, TimeSeries) else np.asarray(residual_load, float)
    if isinstance(raw_price, TimeSeries) and isinstance(residual_load, TimeSeries):
        if raw_price.start != residual_load.start or raw_price.resolution != residual_load.resolution:
            raise ValidationError("price and residual load must be aligned")
    if p.size != r.size:
        raise ValidationError("price and residual load must have equal length")
    if p.size < 100:
        raise ValidationError("merit-order fit needs at least 100 samples")
    if np.all(r == r[0]):
        raise DegenerateDataError("zero-variance residual load")
    fit = linregress(r, p)
    counts, xe, ye = np.histogram2d(r, p, bins=bins)
    return MeritOrderFit(float(fit.slope), float(fit.intercept), float(fit.stderr),
                         float(fit.intercept_stderr), float(fit.rvalue), counts, xe, ye)
