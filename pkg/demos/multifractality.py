"""Scale-dependent Hurst exponents and singularity spectra.

White noise is monofractal with H = 0.5, fractional Gaussian noise keeps its
Hurst exponent and a binomial cascade has a wide spectrum. Banded analysis
reports one exponent and one spectrum width per range of time scales.
"""
import math

import numpy as np

from spotstat.core import TimeSeries
from spotstat.mfdfa import banded_analysis
from spotstat.synthetic import binomial_cascade, fractional_gaussian_noise

FULL = ((0.0, math.inf),)
rng = np.random.default_rng(3)

cases = {
    "white noise": rng.standard_normal(2 ** 15),
    "fGn H=0.8": fractional_gaussian_noise(2 ** 15, 0.8, rng),
    "cascade p=0.3": binomial_cascade(15, 0.3),
}
for name, x in cases.items():
    band = banded_analysis(TimeSeries(x), FULL).bands[0]
    print(f"{name:14s} H={band.H:.3f}  width_alpha={band.spectrum.width_alpha:.3f}")

# a daily cycle on persistent noise raises the exponent below 12 h only
n = 24 * 365 * 2
t = np.arange(n)
x = TimeSeries(fractional_gaussian_noise(n, 0.7, rng) + 2.0 * np.sin(2 * np.pi * t / 24))
print("\nhourly noise with a daily cycle, default bands:")
for band in banded_analysis(x).bands:
    lo, hi = band.band_hours
    print(f"  ({lo:g} h, {hi:g} h]  H={band.H:.3f}  width_alpha={band.spectrum.width_alpha:.3f}")
