"""Multifractal detrended fluctuation analysis.

The profile ``Y = cumsum(x - mean(x))`` is cut into ``floor(n/r)`` segments
from the start and as many from the end. Each segment is detrended by a
least-squares polynomial and its mean squared residual ``F2(v, r)`` is
aggregated as ``F_q(r) = mean(F2**(q/2))**(1/q)``. Slopes of ``log F_q``
against ``log r`` give the generalised Hurst exponents ``h(q)``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.stats import linregress

from .core import TimeSeries
from .errors import DegenerateDataError, ValidationError

__all__ = [
    "DEFAULT_BANDS_HOURS",
    "MfdfaConfig",
    "FluctuationSurface",
    "Spectrum",
    "HurstBand",
    "MfdfaResult",
    "default_scales",
    "default_powers",
    "fluctuation_surface",
    "hurst_in_band",
    "singularity_spectrum",
    "banded_analysis",
]

DEFAULT_BANDS_HOURS = ((0.0, 12.0), (12.0, 48.0), (48.0, math.inf))
SCALES_PER_DECADE = 24
MIN_POWER = 0.1


def default_scales(n: int, poly_order: int = 1, per_decade: int = SCALES_PER_DECADE) -> np.ndarray:
    """Log-spaced integer scales from ``poly_order + 2`` to ``n // 4``."""
    lo, hi = poly_order + 2, n // 4
    if hi < lo:
        raise ValidationError(f"series of length {n} is too short for order-{poly_order} MFDFA")
    k = int(np.floor(np.log10(hi / lo) * per_decade)) + 1
    s = np.unique(np.round(lo * 10.0 ** (np.arange(k) / per_decade)).astype(int))
    return s[(s >= lo) & (s <= hi)]


def default_powers(count: int = 40, lo: float = MIN_POWER, hi: float = 10.0) -> np.ndarray:
    """``count`` uniform powers on ``(lo, hi]``, with 2 added for the Hurst exponent."""
    q = lo + (hi - lo) * np.arange(1, count + 1) / count
    return np.unique(np.concatenate([q, [2.0]]))


@dataclass(frozen=True)
class MfdfaConfig:
    """Scales (segment lengths in samples), powers and detrending order."""

    scales: tuple
    powers: tuple
    poly_order: int = 1

    def __post_init__(self):
        s = np.asarray(self.scales, dtype=int)
        q = np.asarray(self.powers, dtype=float)
        if s.size == 0 or q.size == 0:
            raise ValidationError("MFDFA needs at least one scale and one power")
        if self.poly_order < 1:
            raise ValidationError("poly_order must be >= 1")
        if np.any(np.diff(s) <= 0) or np.any(np.diff(q) <= 0):
            raise ValidationError("scales and powers must be strictly increasing")
        if s[0] < self.poly_order + 2:
            raise ValidationError(f"smallest scale must be >= poly_order + 2 = {self.poly_order + 2}")
        if np.any(q < MIN_POWER) or np.any(q > 10.0):
            raise ValidationError("powers must lie in [0.1, 10]")
        object.__setattr__(self, "scales", tuple(int(v) for v in s))
        object.__setattr__(self, "powers", tuple(float(v) for v in q))

    @classmethod
    def for_length(cls, n: int, poly_order: int = 1, powers: Optional[Sequence[float]] = None,
                   per_decade: int = SCALES_PER_DECADE) -> "MfdfaConfig":
        p = default_powers() if powers is None else powers
        return cls(tuple(default_scales(n, poly_order, per_decade)), tuple(p), poly_order)


@dataclass(frozen=True, eq=False)
class FluctuationSurface:
    """``fluctuation[i, j] = F_{powers[i]}(scales[j])``."""

    scales: np.ndarray
    powers: np.ndarray
    fluctuation: np.ndarray
    resolution_hours: float = 1.0

    @property
    def scales_hours(self) -> np.ndarray:
        return self.scales * self.resolution_hours

    def row(self, power: float) -> np.ndarray:
        i = np.flatnonzero(np.isclose(self.powers, power, rtol=0, atol=1e-12))
        if i.size == 0:
            raise ValidationError(f"power {power} not in the surface")
        return self.fluctuation[i[0]]


def _segment_variances(profile, r, basis):
    n = profile.size
    ns = n // r
    segs = np.concatenate([profile[: ns * r].reshape(ns, r),
                           profile[n - ns * r:].reshape(ns, r)])
    # project out the polynomial subspace spanned by the orthonormal basis
    resid = segs - (segs @ basis) @ basis.T
    return np.mean(resid * resid, axis=1)


def fluctuation_surface(series, config: Optional[MfdfaConfig] = None) -> FluctuationSurface:
    """Fluctuation functions ``F_q(r)`` on a grid of powers and scales.

    Parameters
    ----------
    series : TimeSeries or array_like
    config : MfdfaConfig, optional
        Defaults to ``MfdfaConfig.for_length(n)``.

    Returns
    -------
    FluctuationSurface

    Raises
    ------
    DegenerateDataError
        Zero-variance input.
    ValidationError
        No scale gives at least 4 segments.

    Warns
    -----
    RuntimeWarning
        For each scale dropped because it gives fewer than 4 segments.
    """
    if not isinstance(series, TimeSeries):
        series = TimeSeries(series)
    x = series.values
    n = x.size
    if np.all(x == x[0]) or not np.std(x) > 0:
        raise DegenerateDataError("zero variance series")
    if config is None:
        config = MfdfaConfig.for_length(n)
    scales = np.asarray(config.scales)
    powers = np.asarray(config.powers)
    profile = np.cumsum(x - x.mean())
    kept, rows = [], []
    for r in scales:
        if 2 * (n // r) < 4:
            warnings.warn(f"scale {r} gives fewer than 4 segments and is dropped", RuntimeWarning)
            continue
        t = np.linspace(-1.0, 1.0, r)
        basis, _ = np.linalg.qr(np.vander(t, config.poly_order + 1))
        f2 = _segment_variances(profile, r, basis)
        if np.all(f2 == 0):
            raise DegenerateDataError(f"all segments are exact polynomials at scale {r}")
        with np.errstate(divide="ignore"):
            fq = np.mean(f2[None, :] ** (powers[:, None] / 2.0), axis=1) ** (1.0 / powers)
        kept.append(r)
        rows.append(fq)
    if not kept:
        raise ValidationError("no usable scale")
    fl = np.column_stack(rows)
    return FluctuationSurface(np.asarray(kept), powers.copy(), fl, series.resolution_hours)


def _band_mask(scales, band):
    lo, hi = band
    return (scales > lo) & (scales <= hi)


def hurst_in_band(surface: FluctuationSurface, band: tuple[float, float],
                  power: float = 2.0) -> tuple[float, float]:
    """Generalised Hurst exponent in a scale band.

    Parameters
    ----------
    surface : FluctuationSurface
    band : (lo, hi)
        Scale range in samples; scales with ``lo < r <= hi`` are used, so a
        scale on a shared edge belongs to the lower band.
    power : float

    Returns
    -------
    h, stderr : float
        Unweighted least-squares slope of ``log F_q`` on ``log r`` and its
        standard error.
    """
    m = _band_mask(surface.scales, band)
    if np.count_nonzero(m) < 4:
        raise ValidationError(f"band {band} contains {np.count_nonzero(m)} scales, need >= 4")
    lx = np.log(surface.scales[m].astype(float))
    ly = np.log(surface.row(power)[m])
    fit = linregress(lx, ly)
    return float(fit.slope), float(fit.stderr)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Singularity spectrum from ``h(q)``.

    ``folded`` is set when ``alpha(q)`` is not monotone beyond rounding.
    """

    powers: np.ndarray
    h: np.ndarray
    alpha: np.ndarray
    f: np.ndarray
    width_alpha: float
    width_f: float
    folded: bool


def singularity_spectrum(powers, h) -> Spectrum:
    """Legendre transform of the generalised Hurst exponents.

    Parameters
    ----------
    powers : array_like
        At least five distinct increasing powers.
    h : array_like
        ``h(q)`` at each power.

    Returns
    -------
    Spectrum
        ``alpha = h + q h'`` with ``h'`` from central differences (one-sided
        at the ends), ``f = q (alpha - h) + 1``,
        ``width_alpha = alpha[argmax f] - min(alpha)`` and
        ``width_f = max f - min f``.
    """
    q = np.asarray(powers, dtype=float)
    h = np.asarray(h, dtype=float)
    if q.shape != h.shape or q.ndim != 1:
        raise ValidationError("powers and h must be 1-d arrays of equal length")
    if np.unique(q).size < 5:
        raise ValidationError("singularity spectrum needs at least 5 distinct powers")
    if not np.all(np.isfinite(h)):
        raise ValidationError("h must be finite")
    order = np.argsort(q)
    q, h = q[order], h[order]
    dh = np.gradient(h, q)
    alpha = h + q * dh
    f = q * (alpha - h) + 1.0
    width_alpha = float(alpha[np.argmax(f)] - np.min(alpha))
    width_f = float(np.max(f) - np.min(f))
    da = np.diff(alpha)
    tol = 1e-9 * max(1.0, float(np.max(np.abs(alpha))))
    folded = bool(np.any(da > tol) and np.any(da < -tol))
    return Spectrum(q, h, alpha, f, width_alpha, width_f, folded)


@dataclass(frozen=True, eq=False)
class HurstBand:
    """Exponents for one scale band."""

    band_hours: tuple
    band_samples: tuple
    scales: np.ndarray
    h: np.ndarray
    stderr: np.ndarray
    H: float
    H_stderr: float
    spectrum: Spectrum


@dataclass(frozen=True, eq=False)
class MfdfaResult:
    surface: FluctuationSurface
    bands: tuple
    edge_rule: str = "scales on a shared band edge belong to the lower band"

    @property
    def fluctuation(self) -> np.ndarray:
        return self.surface.fluctuation

    def widths(self) -> list[tuple[float, float]]:
        return [(b.spectrum.width_alpha, b.spectrum.width_f) for b in self.bands]


def banded_analysis(series: TimeSeries, bands=DEFAULT_BANDS_HOURS,
                    config: Optional[MfdfaConfig] = None) -> MfdfaResult:
    """MFDFA with exponents and spectra per time-scale band.

    Parameters
    ----------
    series : TimeSeries
    bands : sequence of (lo, hi)
        Band edges in hours; ``hi`` may be ``inf``.
    config : MfdfaConfig, optional
        Defaults to ``MfdfaConfig.for_length(n)``. The power 2 must be
        present to report ``H``.

    Returns
    -------
    MfdfaResult
    """
    if not isinstance(series, TimeSeries):
        series = TimeSeries(series)
    res_h = series.resolution_hours
    parsed = []
    for band in bands:
        lo, hi = float(band[0]), float(band[1])
        if not hi > lo or lo < 0:
            raise ValidationError(f"band {band} must satisfy 0 <= lo < hi")
        if hi < res_h:
            raise ValidationError(f"band {band} h lies below the series resolution of {res_h:g} h")
        parsed.append((lo, hi))
    surface = fluctuation_surface(series, config)
    if not np.any(np.isclose(surface.powers, 2.0, rtol=0, atol=1e-12)):
        raise ValidationError("power 2 must be included to report H")
    out = []
    for lo, hi in parsed:
        bs = (lo / res_h, hi / res_h)
        try:
            fits = [hurst_in_band(surface, bs, q) for q in surface.powers]
        except ValidationError as exc:
            raise ValidationError(f"band ({lo:g} h, {hi:g} h): {exc}") from None
        h = np.array([v[0] for v in fits])
        se = np.array([v[1] for v in fits])
        H, H_se = hurst_in_band(surface, bs, 2.0)
        out.append(HurstBand((lo, hi), bs, surface.scales[_band_mask(surface.scales, bs)],
                             h, se, H, H_se, singularity_spectrum(surface.powers, h)))
    return MfdfaResult(surface, tuple(out))
