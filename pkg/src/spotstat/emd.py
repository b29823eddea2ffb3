"""Empirical mode decomposition by envelope sifting, and slow-mode detrending."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .core import TimeSeries
from .errors import ValidationError

__all__ = ["EmdDecomposition", "decompose", "detrend", "find_extrema",
           "count_zero_crossings", "is_imf"]

MAX_SIFTS = 100
_MIRROR = 2


@dataclass(frozen=True, eq=False)
class EmdDecomposition:
    """Intrinsic mode functions (fastest first) and the final residual."""

    imfs: tuple
    residual: TimeSeries
    sift_counts: tuple

    def __len__(self):
        return len(self.imfs)

    def reconstruct(self) -> np.ndarray:
        out = self.residual.values.copy()
        for imf in self.imfs:
            out += imf.values
        return out


def find_extrema(x):
    """Locate local maxima and minima.

    Flat plateaus count once, positioned at their midpoint, so the result is
    mirror-symmetric under time reversal.

    Returns
    -------
    max_pos, max_val, min_pos, min_val : ndarray
        Float positions (sample units) and values.
    """
    x = np.asarray(x, dtype=float)
    d = np.diff(x)
    nz = np.flatnonzero(d)
    if nz.size < 2:
        e = np.empty(0)
        return e, e, e, e
    s = np.sign(d[nz])
    k = np.flatnonzero(s[:-1] != s[1:])
    left = nz[k] + 1
    right = nz[k + 1]
    pos = 0.5 * (left + right)
    val = x[left]
    up = s[k] > 0
    return pos[up], val[up], pos[~up], val[~up]


def count_zero_crossings(x) -> int:
    x = np.asarray(x, dtype=float)
    s = np.sign(x)
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))


def is_imf(x) -> bool:
    """True when extrema and zero-crossing counts differ by at most one."""
    pmax, _, pmin, _ = find_extrema(x)
    return abs(pmax.size + pmin.size - count_zero_crossings(x)) <= 1


def _envelope(pos, val, n):
    # mirror the outermost extrema about each end sample
    last = n - 1.0
    lp, lv = -pos[:_MIRROR][::-1], val[:_MIRROR][::-1]
    rp, rv = 2 * last - pos[-_MIRROR:][::-1], val[-_MIRROR:][::-1]
    p = np.concatenate([lp, pos, rp])
    v = np.concatenate([lv, val, rv])
    return CubicSpline(p, v, bc_type="natural")(np.arange(n))


def _sift(x, tol, max_sifts):
    h = x.copy()
    n = h.size
    for k in range(1, max_sifts + 1):
        pmax, vmax, pmin, vmin = find_extrema(h)
        if pmax.size < 1 or pmin.size < 1 or pmax.size + pmin.size < 3:
            return h, k - 1
        mean_env = 0.5 * (_envelope(pmax, vmax, n) + _envelope(pmin, vmin, n))
        h_new = h - mean_env
        denom = np.dot(h, h)
        sd = np.dot(mean_env, mean_env) / denom if denom > 0 else 0.0
        h = h_new
        if sd < tol and is_imf(h):
            return h, k
    return h, max_sifts


def _is_monotone(x) -> bool:
    d = np.diff(x)
    return bool(np.all(d >= 0) or np.all(d <= 0))


def decompose(series: TimeSeries, max_imfs: int | None = None,
              sift_tolerance: float = 0.05) -> EmdDecomposition:
    """Empirical mode decomposition.

    Parameters
    ----------
    series : TimeSeries
        At least 8 samples.
    max_imfs : int, optional
        Upper bound on the number of modes; defaults to ``floor(log2 n) + 2``.
    sift_tolerance : float
        Sifting stops when ``sum(h_{k-1} - h_k)**2 / sum(h_{k-1}**2)`` drops
        below this value and the candidate satisfies the IMF criterion, or
        after 100 sifts.

    Returns
    -------
    EmdDecomposition
        The residual is computed as ``x - sum(imfs)`` so the decomposition is
        complete to rounding.

    Notes
    -----
    Envelopes are natural cubic splines through the extrema, extended by
    mirroring two extrema about each end sample. Extraction stops once the
    remainder is monotone or has fewer than four extrema.
    """
    if not isinstance(series, TimeSeries):
        series = TimeSeries(series)
    x = series.values
    n = x.size
    if n < 8:
        raise ValidationError("decompose needs at least 8 samples")
    cap = int(np.floor(np.log2(n))) + 2
    if max_imfs is None:
        max_imfs = cap
    if max_imfs < 1:
        raise ValidationError("max_imfs must be >= 1")
    if not sift_tolerance > 0:
        raise ValidationError("sift_tolerance must be positive")
    max_imfs = min(int(max_imfs), cap)

    imfs, counts = [], []
    rem = x.copy()
    while len(imfs) < max_imfs:
        if _is_monotone(rem):
            break
        pmax, _, pmin, _ = find_extrema(rem)
        if pmax.size + pmin.size < 4:
            break
        imf, k = _sift(rem, sift_tolerance, MAX_SIFTS)
        imfs.append(imf)
        counts.append(k)
        rem = rem - imf
    residual = x - np.sum(imfs, axis=0) if imfs else x.copy()
    ts = tuple(series.with_values(m, label=f"{series.label} imf{i}".strip())
               for i, m in enumerate(imfs))
    return EmdDecomposition(ts, series.with_values(residual, label=f"{series.label} residual".strip()),
                            tuple(counts))


def detrend(series: TimeSeries, n_slowest: int = 3, *, max_imfs: int | None = None,
            sift_tolerance: float = 0.05, decomposition: EmdDecomposition | None = None):
    """Remove the residual and the ``n_slowest`` slowest IMFs.

    Returns
    -------
    detrended, trend : TimeSeries
        ``trend = residual + sum of the n_slowest slowest IMFs`` and
        ``detrended = series - trend``.
    """
    if not isinstance(series, TimeSeries):
        series = TimeSeries(series)
    if n_slowest < 0:
        raise ValidationError("n_slowest must be non-negative")
    dec = decomposition if decomposition is not None else decompose(series, max_imfs, sift_tolerance)
    if len(dec.imfs) < n_slowest:
        raise ValidationError(
            f"decomposition yields {len(dec.imfs)} IMFs, fewer than the {n_slowest} requested")
    trend = dec.residual.values.copy()
    for imf in dec.imfs[len(dec.imfs) - n_slowest:]:
        trend += imf.values
    detrended = series.values - trend
    # detrended + trend reproduces the input up to one rounding
    return (series.with_values(detrended, label=f"{series.label} detrended".strip()),
            series.with_values(trend, label=f"{series.label} trend".strip()))
