"""Superstatistical time scales, local volatilities and the entropic index."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .core import TimeSeries, autocorrelation
from .distfit import DistributionFit, select_model
from .errors import DegenerateDataError, NumericalError, SpotstatError, ValidationError

__all__ = [
    "LocalMomentCurve",
    "SuperstatResult",
    "short_time_tau",
    "local_skewness_curve",
    "zero_crossings",
    "long_time_T",
    "volatility_series",
    "entropic_index",
    "fit_volatility_distribution",
    "crossing_is_robust",
    "superstat_pipeline",
]

DEFAULT_SEARCH_RANGE = (24.0, 240.0)
VOLATILITY_FAMILIES = ("logNormal", "inverseGamma")
OPTIONAL_VOLATILITY_FAMILIES = ("gamma", "F")
ROBUST_Z = 3.0


def short_time_tau(series: TimeSeries, max_lag: Optional[float] = None,
                   method: str = "crossing") -> float:
    """Decorrelation time of the autocorrelation in hours.

    Parameters
    ----------
    series : TimeSeries
    max_lag : float, optional
        Horizon in hours; defaults to half the series duration.
    method : {'crossing', 'fit'}
        ``'crossing'`` returns the first lag where ``C/C(0)`` drops below
        ``1/e``, linearly interpolated. ``'fit'`` fits ``ln C`` linearly over
        the initial decade of decay (``C >= 0.1``) and returns ``-1/slope``.
    """
    if not isinstance(series, TimeSeries):
        series = TimeSeries(series)
    if max_lag is None:
        max_lag = 0.5 * series.duration_hours
    lags, c = autocorrelation(series, max_lag)
    thr = math.exp(-1.0)
    below = np.flatnonzero(c < thr)
    if method == "crossing":
        if below.size == 0:
            raise NumericalError("no decorrelation within horizon")
        k = int(below[0])
        c0, c1 = c[k - 1], c[k]
        return float(lags[k - 1] + (c0 - thr) / (c0 - c1) * (lags[k] - lags[k - 1]))
    if method == "fit":
        stop = np.flatnonzero(c < 0.1)
        if stop.size == 0:
            raise NumericalError("no decorrelation within horizon")
        m = int(stop[0])
        if m < 2:
            # one-step decay: fall back to the crossing
            return short_time_tau(series, max_lag, "crossing")
        slope = np.polyfit(lags[:m], np.log(c[:m]), 1)[0]
        if not slope < 0:
            raise NumericalError("autocorrelation does not decay over the fit range")
        return float(-1.0 / slope)
    raise ValidationError(f"unknown tau method {method!r}")


@dataclass(frozen=True, eq=False)
class LocalMomentCurve:
    """Segment-averaged skewness and kurtosis as functions of window length.

    Attributes
    ----------
    windows_hours : ndarray
    windows_samples : ndarray
    skewness, kurtosis : ndarray
        Mean over complete non-overlapping segments of the per-segment moment.
    skew_stderr : ndarray
        Standard error of the mean skewness across segments.
    n_segments, n_skipped : ndarray
    """

    windows_hours: np.ndarray
    windows_samples: np.ndarray
    skewness: np.ndarray
    kurtosis: np.ndarray
    skew_stderr: np.ndarray
    n_segments: np.ndarray
    n_skipped: np.ndarray


def _window_samples(series: TimeSeries, hours) -> np.ndarray:
    s = np.asarray(hours, dtype=float) / series.resolution_hours
    return np.rint(s).astype(int)


def local_skewness_curve(series: TimeSeries, windows: Sequence[float]) -> LocalMomentCurve:
    """Local skewness ``s_p(dt)`` and kurtosis ``k_p(dt)``.

    Parameters
    ----------
    series : TimeSeries
    windows : sequence of float
        Window lengths in hours, increasing. Each must span at least 4
        samples and at most ``n / 8`` so that 8 segments are averaged.

    Returns
    -------
    LocalMomentCurve

    Notes
    -----
    The series is cut into consecutive segments starting at the first
    sample; the trailing partial segment is dropped. Zero-variance segments
    are skipped; more than half skipped is an error.
    """
    if not isinstance(series, TimeSeries):
        series = TimeSeries(series)
    x = series.values
    n = x.size
    hours = np.asarray(windows, dtype=float)
    if hours.ndim != 1 or hours.size == 0:
        raise ValidationError("windows must be a non-empty 1-d sequence")
    w = _window_samples(series, hours)
    if np.any(np.diff(w) <= 0):
        raise ValidationError("windows must be strictly increasing in samples")
    if w[0] < 4:
        raise ValidationError("each window must span at least 4 samples")
    if w[-1] > n / 8:
        raise ValidationError(f"window of {w[-1]} samples exceeds n/8 = {n / 8:g}")
    sk = np.empty(w.size)
    ku = np.empty(w.size)
    se = np.empty(w.size)
    nseg = np.empty(w.size, dtype=int)
    nskip = np.empty(w.size, dtype=int)
    for i, r in enumerate(w):
        m = n // r
        seg = x[: m * r].reshape(m, r)
        d = seg - seg.mean(axis=1, keepdims=True)
        m2 = np.mean(d * d, axis=1)
        ok = m2 > 0
        if np.count_nonzero(~ok) > 0.5 * m:
            raise DegenerateDataError(
                f"more than half of the {r}-sample segments have zero variance")
        m2 = m2[ok]
        dk = d[ok]
        # explicit products keep the skewness exactly odd under negation
        s = np.mean(dk * dk * dk, axis=1) / m2 ** 1.5
        k = np.mean((dk * dk) ** 2, axis=1) / m2 ** 2
        sk[i] = s.mean()
        ku[i] = k.mean()
        se[i] = s.std(ddof=1) / np.sqrt(s.size) if s.size > 1 else np.inf
        nseg[i] = s.size
        nskip[i] = m - s.size
    return LocalMomentCurve(w * series.resolution_hours, w, sk, ku, se, nseg, nskip)


def _curve_arrays(curve):
    if isinstance(curve, LocalMomentCurve):
        return curve.windows_hours, curve.skewness
    arr = np.asarray(curve, dtype=float)
    if arr.ndim != 2 or 2 not in arr.shape:
        raise ValidationError("curve must be a LocalMomentCurve or a sequence of (dt, s) pairs")
    if arr.shape[1] != 2:
        arr = arr.T
    return arr[:, 0], arr[:, 1]


def zero_crossings(curve, lo: float = 0.0, hi: float = math.inf) -> list[float]:
    """All sign changes of a curve with ``lo <= dt <= hi``, linearly interpolated."""
    t, s = _curve_arrays(curve)
    out = []
    for i in range(t.size):
        if not lo <= t[i] <= hi:
            continue
        if s[i] == 0.0:
            out.append(float(t[i]))
            continue
        if i + 1 < t.size and t[i + 1] <= hi and s[i + 1] != 0.0 and np.sign(s[i]) != np.sign(s[i + 1]):
            out.append(float(t[i] + s[i] / (s[i] - s[i + 1]) * (t[i + 1] - t[i])))
    return out


def long_time_T(curve, search_range: tuple[float, float] = DEFAULT_SEARCH_RANGE) -> float:
    """First zero crossing of the local skewness inside ``search_range`` (hours).

    Raises
    ------
    NumericalError
        No sign change in range; the message lists the curve extrema.
    """
    t, s = _curve_arrays(curve)
    lo, hi = search_range
    if not hi > lo:
        raise ValidationError("search range must satisfy lo < hi")
    if np.count_nonzero((t >= lo) & (t <= hi)) < 2:
        raise ValidationError("curve needs at least 2 points inside the search range")
    zc = zero_crossings(curve, lo, hi)
    if not zc:
        m = (t >= lo) & (t <= hi)
        raise NumericalError(
            f"no sign change of the local skewness in [{lo:g}, {hi:g}] h; "
            f"curve min {s[m].min():.4g} at {t[m][np.argmin(s[m])]:g} h, "
            f"max {s[m].max():.4g} at {t[m][np.argmax(s[m])]:g} h")
    return zc[0]


def crossing_is_robust(curve: LocalMomentCurve, T: float, z: float = ROBUST_Z) -> bool:
    """Whether the skewness is significantly nonzero before ``T``.

    True when some window shorter than ``T`` has ``sign * s > z * stderr``,
    where ``sign`` is the sign of the curve just before the crossing. A curve
    that only wanders around zero within its sampling error fails.
    """
    t, s, se = curve.windows_hours, curve.skewness, curve.skew_stderr
    before = t < T
    if not np.any(before):
        return False
    sign = np.sign(s[before][-1]) if s[before][-1] != 0 else np.sign(np.sum(s[before]))
    if sign == 0:
        return False
    return bool(np.any(sign * s[before] > z * se[before]))


def volatility_series(series: TimeSeries, T: float) -> TimeSeries:
    """Inverse local variance over consecutive windows of length ``T`` hours.

    Returns
    -------
    TimeSeries
        ``beta_j = 1 / var(window j)`` with resolution ``T``; the number of
        windows is ``floor(n / T_samples)``, aligned to the series start.
    """
    if not isinstance(series, TimeSeries):
        series = TimeSeries(series)
    r = int(round(T / series.resolution_hours))
    x = series.values
    if r < 8:
        raise ValidationError(f"T spans {r} samples, need at least 8")
    if x.size < 8 * r:
        raise ValidationError(f"series of {x.size} samples is shorter than 8 T = {8 * r}")
    m = x.size // r
    seg = x[: m * r].reshape(m, r)
    d = seg - seg.mean(axis=1, keepdims=True)
    var = np.mean(d * d, axis=1)
    bad = np.flatnonzero(~(var > 0))
    if bad.size:
        raise DegenerateDataError(f"degenerate window {int(bad[0])}: zero variance")
    return TimeSeries(1.0 / var, series.resolution * r, series.start, "beta")


def entropic_index(beta_series) -> float:
    """``<beta**2> / <beta>**2`` over at least 16 values."""
    b = beta_series.values if isinstance(beta_series, TimeSeries) else np.asarray(beta_series, float)
    if b.size < 16:
        raise ValidationError(f"entropic index needs at least 16 values, got {b.size}")
    if np.all(b == b[0]):
        return 1.0
    return float(np.mean(b * b) / np.mean(b) ** 2)


def fit_volatility_distribution(beta_series, families: Optional[Sequence[str]] = None,
                                include_optional: bool = False, **kw) -> list[DistributionFit]:
    """Fit and rank candidate densities for the volatilities.

    Log-normal and inverse-Gamma by default; ``include_optional`` adds Gamma
    and F. Extra keywords go to :func:`spotstat.distfit.select_model`.
    """
    b = beta_series.values if isinstance(beta_series, TimeSeries) else np.asarray(beta_series, float)
    if np.any(b <= 0):
        raise ValidationError("volatilities must be positive")
    fams = list(families or VOLATILITY_FAMILIES)
    if include_optional:
        fams += [f for f in OPTIONAL_VOLATILITY_FAMILIES if f not in fams]
    if np.all(b == b[0]):
        raise DegenerateDataError("degenerate support: constant volatility")
    return select_model(b, fams, **kw)


@dataclass(eq=False)
class SuperstatResult:
    """Outputs of :func:`superstat_pipeline`.

    Fields are None when the corresponding stage failed; ``errors`` maps the
    stage name to the message.
    """

    tau: Optional[float] = None
    T: Optional[float] = None
    early_crossings: list = field(default_factory=list)
    curve: Optional[LocalMomentCurve] = None
    beta_series: Optional[TimeSeries] = None
    q_bar: Optional[float] = None
    beta_fits: list = field(default_factory=list)
    acf_lags: Optional[np.ndarray] = None
    acf: Optional[np.ndarray] = None
    beta_acf_lags: Optional[np.ndarray] = None
    beta_acf: Optional[np.ndarray] = None
    robust_crossing: bool = False
    slower_volatility_decay: bool = False
    valid: bool = False
    search_range: tuple = DEFAULT_SEARCH_RANGE
    errors: dict = field(default_factory=dict)

    @property
    def skew_curve(self):
        c = self.curve
        return None if c is None else np.column_stack([c.windows_hours, c.skewness])

    @property
    def kurt_curve(self):
        c = self.curve
        return None if c is None else np.column_stack([c.windows_hours, c.kurtosis])


def default_windows(series: TimeSeries, search_range=DEFAULT_SEARCH_RANGE) -> np.ndarray:
    """Window lengths in hours for the local skewness curve.

    Windows step by one hour (one sample for coarser series) from
    ``max(4 samples, 1 h)`` to 1.25 times the search ceiling, capped at
    ``n/8`` samples.
    """
    res = series.resolution_hours
    step = max(1, int(round(1.0 / res)))
    lo = max(4, step)
    hi = min(len(series) // 8, int(round(1.25 * search_range[1] / res)))
    if hi < lo:
        raise ValidationError("series too short for a local skewness curve")
    return np.arange(lo, hi + 1, step) * res


def _acf_at(lags, c, lag):
    if lag > lags[-1]:
        return np.nan
    return float(np.interp(lag, lags, c))


def superstat_pipeline(series: TimeSeries, search_range=DEFAULT_SEARCH_RANGE,
                       windows: Optional[Sequence[float]] = None, tau_method: str = "crossing",
                       families: Optional[Sequence[str]] = None,
                       include_optional: bool = False) -> SuperstatResult:
    """Short time, long time, volatilities, entropic index and validity.

    The result is valid when ``tau < T``, the local-skewness crossing is
    robust (see :func:`crossing_is_robust`) and the volatility
    autocorrelation at one volatility step exceeds the price
    autocorrelation at the same lag. A failing stage is recorded in
    ``errors`` and later stages that depend on it are skipped.
    """
    if not isinstance(series, TimeSeries):
        series = TimeSeries(series)
    out = SuperstatResult(search_range=tuple(search_range))

    def stage(name, fn):
        try:
            return fn()
        except SpotstatError as exc:
            out.errors[name] = f"{type(exc).__name__}: {exc}"
            return None

    horizon = min(0.5 * series.duration_hours, max(4.0 * search_range[1], 1.0))
    acf = stage("autocorrelation", lambda: autocorrelation(series, horizon))
    if acf is not None:
        out.acf_lags, out.acf = acf
    out.tau = stage("tau", lambda: short_time_tau(series, horizon, tau_method))
    if windows is None:
        windows = stage("curve", lambda: default_windows(series, search_range))
    if windows is not None:
        out.curve = stage("curve", lambda: local_skewness_curve(series, windows))
    if out.curve is not None:
        out.early_crossings = zero_crossings(out.curve, 0.0, search_range[0])
        out.T = stage("T", lambda: long_time_T(out.curve, search_range))
    if out.T is not None:
        out.robust_crossing = crossing_is_robust(out.curve, out.T)
        out.beta_series = stage("beta", lambda: volatility_series(series, out.T))
    if out.beta_series is not None:
        out.q_bar = stage("q_bar", lambda: entropic_index(out.beta_series))
        out.beta_fits = stage("beta_fits", lambda: fit_volatility_distribution(
            out.beta_series, families, include_optional)) or []
        bh = out.beta_series.resolution_hours
        b_acf = stage("beta_autocorrelation", lambda: autocorrelation(
            out.beta_series, min(0.5 * out.beta_series.duration_hours, 10 * bh)))
        if b_acf is not None:
            out.beta_acf_lags, out.beta_acf = b_acf
            if out.acf is not None and out.beta_acf.size > 1:
                cp = _acf_at(out.acf_lags, out.acf, bh)
                out.slower_volatility_decay = bool(np.isfinite(cp) and out.beta_acf[1] > cp)
    out.valid = bool(out.tau is not None and out.T is not None and out.tau < out.T
                     and out.robust_crossing and out.slower_volatility_decay)
    return out
