"""Synthetic series with known statistics, used as test oracles and fixtures."""
from __future__ import annotations

import csv
import json
import os
from datetime import datetime, timedelta, timezone
from pathlib import Path

import numpy as np
from scipy.signal import lfilter

from .core import TimeSeries
from .errors import ValidationError

__all__ = [
    "fractional_gaussian_noise",
    "binomial_cascade",
    "ar1",
    "q_gaussian_sample",
    "RegimeCycleSample",
    "regime_cycle_series",
    "make_fixture",
    "write_fixture",
    "FIXTURE_SEED",
    "FIXTURE_DIR",
    "WEATHER_TYPES",
]

FIXTURE_SEED = 20150101
# bundled fixture written by write_fixture(FIXTURE_DIR)
FIXTURE_DIR = Path(__file__).resolve().parent / "data" / "fixture"
WEATHER_TYPES = ("N", "NE", "E", "SE", "S", "SW", "W", "NW",
                 "Cyclonic", "Anticyclonic", "Mixed")


def fractional_gaussian_noise(n: int, hurst: float, rng: np.random.Generator) -> np.ndarray:
    """Exact fractional Gaussian noise by circulant embedding (Davies-Harte).

    Unit variance, autocovariance
    ``0.5 (|k+1|**2H - 2 |k|**2H + |k-1|**2H)``.
    """
    if not 0 < hurst < 1:
        raise ValidationError("hurst must lie in (0, 1)")
    k = np.arange(n + 1, dtype=float)
    g = 0.5 * ((k + 1) ** (2 * hurst) - 2 * k ** (2 * hurst) + np.abs(k - 1) ** (2 * hurst))
    row = np.concatenate([g, g[-2:0:-1]])
    lam = np.fft.fft(row).real
    if np.any(lam < -1e-10 * lam.max()):
        raise ValidationError("circulant embedding is not non-negative definite")
    lam = np.clip(lam, 0.0, None)
    m = row.size
    z = rng.standard_normal(m) + 1j * rng.standard_normal(m)
    y = np.fft.fft(np.sqrt(lam / m) * z)
    return y[:n].real


def binomial_cascade(levels: int, p: float) -> np.ndarray:
    """Deterministic binomial multifractal series of length ``2**levels``.

    ``x_k = p**n1(k) (1 - p)**(levels - n1(k))`` with ``n1(k)`` the number of
    ones in the binary expansion of ``k``.
    """
    if not 0 < p < 1:
        raise ValidationError("p must lie in (0, 1)")
    k = np.arange(2 ** levels, dtype=np.int64)
    ones = np.zeros_like(k)
    for b in range(levels):
        ones += (k >> b) & 1
    return p ** ones * (1.0 - p) ** (levels - ones)


def ar1(n: int, phi: float, rng: np.random.Generator, sigma: float = 1.0) -> np.ndarray:
    """Stationary AR(1) ``x_t = phi x_{t-1} + e_t``."""
    e = rng.normal(0.0, sigma, n)
    e[0] /= np.sqrt(1.0 - phi * phi)
    return lfilter([1.0], [1.0, -phi], e)


def q_gaussian_sample(n: int, q: float, c: float, mu: float, rng: np.random.Generator) -> np.ndarray:
    """Draws from the q-Gaussian ``sqrt(c)/N_q e_q(-c (x - mu)**2)``, ``1 < q < 3``.

    Uses the identity with a Student t of ``(3 - q)/(q - 1)`` degrees of
    freedom scaled by ``1/sqrt((3 - q) c)``.
    """
    if not 1 < q < 3:
        raise ValidationError("q must lie in (1, 3)")
    nu = (3.0 - q) / (q - 1.0)
    return mu + rng.standard_t(nu, n) / np.sqrt((3.0 - q) * c)


class RegimeCycleSample:
    """Output of :func:`regime_cycle_series`."""

    def __init__(self, series, cycle_beta, q_bar):
        self.series = series
        self.cycle_beta = cycle_beta
        self.q_bar = q_bar


def regime_cycle_series(rng: np.random.Generator, *, years: float = 5.0, cycle_hours: int = 96,
                        resolution_minutes: float = 60.0, windy_fraction: float = 0.1,
                        shape: float = 9.0, log_vol_sd: float = 0.32, persistence: float = 0.7,
                        coupling: float = 0.1,
                        start: datetime = datetime(2015, 1, 1, tzinfo=timezone.utc),
                        label: str = "regime-cycle") -> RegimeCycleSample:
    """Superstatistical series whose volatility switches every ``cycle_hours``.

    Each cycle holds a calm phase followed by a shorter windy phase with a
    lower mean. Inside the cycle the noise is a standardised Gamma variable,
    scaled so that the skew of the phase means cancels the noise skew over
    one full cycle; local distributions are therefore skewed on short
    windows and symmetric on windows of one cycle. Every cycle then gets its
    own volatility ``sigma_k = exp(log_vol_sd g_k)`` with ``g`` a unit AR(1)
    across cycles, and the cycle mean moves against ``sigma_k``.

    Returns
    -------
    RegimeCycleSample
        ``cycle_beta = 1 / sigma_k**2`` and the generator's entropic index
        ``q_bar = mean(beta**2) / mean(beta)**2``.
    """
    per_cycle = int(round(cycle_hours * 60.0 / resolution_minutes))
    n_cycles = int(years * 365 * 24 * 60.0 / resolution_minutes) // per_cycle
    if n_cycles < 2 or per_cycle < 4:
        raise ValidationError("series too short for the requested cycle length")
    n_windy = int(round(windy_fraction * per_cycle))
    if not 0 < n_windy < per_cycle:
        raise ValidationError("windy_fraction leaves an empty phase")
    p = n_windy / per_cycle
    noise_skew = 2.0 / np.sqrt(shape)
    # third moment of the two-level mean profile is p (1-p) (1-2p); match it
    scale = np.cbrt(p * (1 - p) * (1 - 2 * p) / noise_skew)
    z = (rng.gamma(shape, 1.0, (n_cycles, per_cycle)) - shape) / np.sqrt(shape)
    profile = np.r_[np.full(per_cycle - n_windy, p), np.full(n_windy, -(1.0 - p))]
    x = (scale * z + profile) / np.sqrt(scale ** 2 + p * (1 - p))
    e = rng.standard_normal(n_cycles)
    g = np.empty(n_cycles)
    g[0] = e[0]
    for i in range(1, n_cycles):
        g[i] = persistence * g[i - 1] + np.sqrt(1.0 - persistence ** 2) * e[i]
    sigma = np.exp(log_vol_sd * g)
    x = x * sigma[:, None] - coupling * (sigma - sigma.mean())[:, None]
    beta = 1.0 / sigma ** 2
    ts = TimeSeries(x.ravel(), timedelta(minutes=resolution_minutes), start, label)
    return RegimeCycleSample(ts, beta, float(np.mean(beta ** 2) / np.mean(beta) ** 2))


FIXTURE_CYCLE_HOURS = 6
FIXTURE_RESOLUTION_MINUTES = 15


def make_fixture(seed: int = FIXTURE_SEED, days: int = 30):
    """Quarter-hourly prices with hourly weather and residual load on the price grid.

    Prices are ``base + daily cycle + slow drift + merit-order term +
    regime-cycle noise - wind discount``. The regime cycle lasts
    :data:`FIXTURE_CYCLE_HOURS`, short enough that a 30-day series holds
    more than 100 volatility windows. Wind follows a persistent two-state
    chain at hourly resolution: windy hours carry high f-parameter values,
    westerly or cyclonic circulation and lower prices.

    Returns
    -------
    dict
        ``prices``, ``weather`` and ``residual_load`` as lists of row tuples.
    """
    rng = np.random.default_rng(seed)
    start = datetime(2019, 1, 1, tzinfo=timezone.utc)
    res = FIXTURE_RESOLUTION_MINUTES
    sample = regime_cycle_series(rng, years=days / 365.0, cycle_hours=FIXTURE_CYCLE_HOURS,
                                 resolution_minutes=res, windy_fraction=0.25, shape=4.0,
                                 log_vol_sd=0.4, persistence=0.5, coupling=0.2, start=start)
    noise = sample.series.values
    n = noise.size
    per_hour = 60 // res
    hours = days * 24
    # hourly wind state: two-state chain with mean run lengths of 20 h (calm) and 12 h (windy)
    windy_h = np.zeros(hours, dtype=bool)
    u = rng.random(hours)
    for i in range(1, hours):
        windy_h[i] = u[i] < (11.0 / 12.0 if windy_h[i - 1] else 1.0 / 20.0)
    f_param = np.where(windy_h, rng.gamma(9.0, 2.5, hours), rng.gamma(3.0, 2.5, hours))
    calm_types = np.array(["Anticyclonic", "N", "NE", "E", "Mixed"])
    windy_types = np.array(["W", "SW", "NW", "Cyclonic"])
    cwt = np.empty(hours, dtype=object)
    # a circulation type holds for the whole wind-state run, or for 6 to 30 hours
    i = 0
    while i < hours:
        run = int(rng.integers(6, 31))
        j = i + 1
        while j < hours and j < i + run and windy_h[j] == windy_h[i]:
            j += 1
        pool, w = ((windy_types, [0.7, 0.1, 0.1, 0.1]) if windy_h[i]
                   else (calm_types, [0.6, 0.1, 0.1, 0.1, 0.1]))
        cwt[i:j] = pool[rng.choice(pool.size, p=w)]
        i = j
    t_h = np.arange(n) / per_hour
    f_q = np.repeat(f_param, per_hour)[:n]
    daily = 6.0 * np.sin(2 * np.pi * (t_h % 24 - 8) / 24.0)
    drift = 5.0 * np.sin(2 * np.pi * np.arange(n) / n)
    resid_load = (45000.0 + 300.0 * daily + 4000.0 * noise - 150.0 * (f_q - f_q.mean())
                  + rng.normal(0.0, 1500.0, n))
    price = (40.0 + drift + 0.0012 * (resid_load - 45000.0) + 9.0 * noise
             - 0.3 * (f_q - f_q.mean()) + rng.normal(0.0, 2.0, n))
    fmt = "%Y-%m-%dT%H:%M:%SZ"
    q_stamps = [(start + timedelta(minutes=res * k)).strftime(fmt) for k in range(n)]
    h_stamps = [(start + timedelta(hours=k)).strftime(fmt) for k in range(hours)]
    return {
        "prices": [(s, f"{v:.4f}") for s, v in zip(q_stamps, price)],
        "weather": [(s, f"{v:.4f}", c) for s, v, c in zip(h_stamps, f_param, cwt)],
        "residual_load": [(s, f"{v:.2f}") for s, v in zip(q_stamps, resid_load)],
    }


_HEADERS = {
    "prices": ("timestamp", "price"),
    "weather": ("timestamp", "f_param", "cwt"),
    "residual_load": ("timestamp", "residual_load_mw"),
}


def write_fixture(directory, seed: int = FIXTURE_SEED, days: int = 30) -> dict:
    """Write the fixture CSVs and a matching ``config.json`` into ``directory``."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    data = make_fixture(seed, days)
    paths = {}
    for name, rows in data.items():
        path = d / f"{name}.csv"
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(_HEADERS[name])
            w.writerows(rows)
        paths[name] = path
    config = {
        "inputs": {"prices": "prices.csv", "weather": "weather.csv",
                   "residual_load": "residual_load.csv"},
        "output_dir": "out",
        "seed": seed,
        "superstat": {"search_range_hours": [2.0, 24.0]},
    }
    with open(d / "config.json", "w") as fh:
        json.dump(config, fh, indent=2, sort_keys=True)
        fh.write("\n")
    paths["config"] = d / "config.json"
    return paths


if __name__ == "__main__":  # pragma: no cover
    import sys

    target = sys.argv[1] if len(sys.argv) > 1 else os.path.join(
        os.path.dirname(__file__), "data", "fixture")
    write_fixture(target)
