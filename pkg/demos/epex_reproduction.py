"""Published reference values on the EPEX SPOT 2015-2019 German price series.

The dataset is licensed and not shipped. Place three CSV files with the
``timestamp,price`` schema in one directory::

    day_ahead.csv            hourly day-ahead auction prices
    intraday_hourly.csv      hourly continuous intraday prices
    intraday_quarterly.csv   quarter-hourly continuous intraday prices

then run::

    python demos/epex_reproduction.py /path/to/epex

or set ``SPOTSTAT_EPEX_DIR=/path/to/epex`` and run the acceptance suite.
Every check prints one line with the measured value, the target and the
tolerance. The full run takes a few minutes on a laptop.
"""
from __future__ import annotations

import math
import sys
import time
from dataclasses import dataclass
from pathlib import Path

from spotstat.cli.ingest import ingest_prices
from spotstat.distfit import select_model
from spotstat.emd import detrend
from spotstat.mfdfa import DEFAULT_BANDS_HOURS, banded_analysis
from spotstat.superstat import superstat_pipeline

SERIES = ("day_ahead", "intraday_hourly", "intraday_quarterly")

# reference values per series, in SERIES order
Q_GAUSSIAN = (1.46, 1.50, 1.46)
ALPHA_STABLE = (1.61, 1.54, 1.61)
# width of the singularity spectrum per band: (>48 h, 12-48 h, <12 h)
WIDTH_ALPHA = ((0.29, 0.14, 0.99), (0.27, 0.50, 0.71), (0.24, 0.47, 0.84))
TAU_HOURS = (13.5, 11.8, 7.6)
T_HOURS = (95.0, 108.0, 104.0)
Q_BAR = (1.55, 1.61, 1.46)
HURST_BELOW_12H = (0.63, 0.61, 0.31)
HURST_ABOVE_12H = 0.16


@dataclass
class Check:
    name: str
    value: float
    target: float
    tol: float

    @property
    def ok(self) -> bool:
        return self.value is not None and math.isfinite(self.value) and abs(self.value - self.target) <= self.tol

    def line(self) -> str:
        v = "n/a" if self.value is None else f"{self.value:.4g}"
        return f"[{'PASS' if self.ok else 'FAIL'}] {self.name}: {v} (target {self.target:g} +/- {self.tol:g})"


def analyse(path: Path) -> dict:
    """Detrend one series and run distribution, MFDFA and superstatistics stages."""
    price = ingest_prices(path)
    det, _ = detrend(price, 3)
    fits = select_model(det, ["qGaussian", "alphaStable"])
    bands = tuple(DEFAULT_BANDS_HOURS) + ((12.0, math.inf),)
    mf = banded_analysis(det, bands)
    ss = superstat_pipeline(det)
    return {"fits": fits, "mfdfa": mf, "superstat": ss}


def reproduce(data_dir) -> list[Check]:
    data_dir = Path(data_dir)
    checks = []
    ranked_first = 0
    for i, name in enumerate(SERIES):
        res = analyse(data_dir / f"{name}.csv")
        fits = {f.family: f for f in res["fits"]}
        ranked_first += res["fits"][0].family == "qGaussian"
        checks.append(Check(f"{name} q", fits["qGaussian"].params.get("q"), Q_GAUSSIAN[i], 0.05))
        checks.append(Check(f"{name} alpha", fits["alphaStable"].params.get("alpha"), ALPHA_STABLE[i], 0.05))
        bands = res["mfdfa"].bands
        # bands[0..2] are (<12 h, 12-48 h, >48 h); reference order is reversed
        for k, label in enumerate((">48h", "12-48h", "<12h")):
            checks.append(Check(f"{name} width_alpha {label}", bands[2 - k].spectrum.width_alpha,
                                WIDTH_ALPHA[i][k], 0.1))
        checks.append(Check(f"{name} H <12h", bands[0].H, HURST_BELOW_12H[i], 0.05))
        checks.append(Check(f"{name} H >12h", bands[3].H, HURST_ABOVE_12H, 0.05))
        ss = res["superstat"]
        checks.append(Check(f"{name} tau", ss.tau, TAU_HOURS[i], 1.0))
        checks.append(Check(f"{name} T", ss.T, T_HOURS[i], 10.0))
        checks.append(Check(f"{name} q_bar", ss.q_bar, Q_BAR[i], 0.1))
    checks.append(Check("qGaussian ranked first (series count)", float(ranked_first), 3.0, 0.0))
    return checks


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 1:
        print(__doc__)
        return 1
    t0 = time.perf_counter()
    checks = reproduce(argv[0])
    for c in checks:
        print(c.line())
    print(f"{sum(c.ok for c in checks)}/{len(checks)} checks passed in {time.perf_counter() - t0:.0f} s")
    return 0 if all(c.ok for c in checks) else 1


if __name__ == "__main__":
    sys.exit(main())
