"""CSV ingestion for price, weather and residual-load series."""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path

import numpy as np

from ..core import TimeSeries
from ..errors import ValidationError
from ..weather import WEATHER_TYPES, WeatherSeries

__all__ = ["IngestInfo", "read_price_csv", "ingest_prices", "ingest_weather",
           "ingest_residual_load", "parse_timestamp"]

log = logging.getLogger(__name__)

MAX_INTERPOLATED_GAP = 3


@dataclass
class IngestInfo:
    """What ingestion did to the raw rows."""

    path: str
    rows: int = 0
    interpolated: int = 0
    gaps: list = field(default_factory=list)
    dropped: int = 0

    def to_dict(self) -> dict:
        return {"path": self.path, "rows": self.rows, "interpolated": self.interpolated,
                "gaps": [list(g) for g in self.gaps], "dropped": self.dropped}


def parse_timestamp(text: str) -> datetime:
    """ISO-8601 timestamp as an aware UTC datetime; naive values are UTC."""
    t = text.strip()
    if t.endswith(("Z", "z")):
        t = t[:-1] + "+00:00"
    ts = datetime.fromisoformat(t)
    if ts.tzinfo is None:
        return ts.replace(tzinfo=timezone.utc)
    return ts.astimezone(timezone.utc)


def _read_rows(path, columns):
    p = Path(path)
    if not p.is_file():
        raise ValidationError(f"input file not found: {p}")
    with open(p, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ValidationError(f"{p}: empty file") from None
        missing = [c for c in columns if c not in header]
        if missing:
            raise ValidationError(f"{p}: missing column(s) {missing}; header is {header}")
        pos = [header.index(c) for c in columns]
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                rows.append((lineno, [row[i] for i in pos]))
            except IndexError:
                raise ValidationError(f"{p}:{lineno}: expected {len(header)} fields") from None
    if not rows:
        raise ValidationError(f"{p}: no data rows")
    return p, rows


def _time_axis(p, lines, stamps, allow_gaps):
    """Resolution, per-row sample offsets and the kept offset window."""
    secs = np.array([(t - stamps[0]).total_seconds() for t in stamps])
    d = np.diff(secs)
    for i in np.flatnonzero(d <= 0):
        raise ValidationError(
            f"{p}:{lines[i + 1]}: timestamps must increase strictly "
            f"({stamps[i].isoformat()} then {stamps[i + 1].isoformat()})")
    if d.size == 0:
        return timedelta(hours=1), np.zeros(1, dtype=np.int64), (0, 1), []
    # the most common step defines the grid
    vals, counts = np.unique(d, return_counts=True)
    base = float(vals[np.argmax(counts)])
    ratio = d / base
    steps = np.rint(ratio).astype(np.int64)
    bad = np.flatnonzero((np.abs(ratio - steps) > 1e-6) | (steps < 1))
    if bad.size:
        i = int(bad[0])
        raise ValidationError(
            f"{p}:{lines[i + 1]}: mixed resolutions ({d[i]:g} s step against a {base:g} s grid)")
    offs = np.concatenate([[0], np.cumsum(steps)])
    gaps = []
    for i in np.flatnonzero(steps > 1):
        gaps.append((stamps[i].isoformat(), stamps[i + 1].isoformat(), int(steps[i] - 1),
                     int(i)))
    big = [g for g in gaps if g[2] > MAX_INTERPOLATED_GAP]
    window = (0, int(offs[-1]) + 1)
    if big:
        if not allow_gaps:
            g = big[0]
            raise ValidationError(
                f"{p}: gap of {g[2]} missing samples between {g[0]} and {g[1]} "
                f"(more than {MAX_INTERPOLATED_GAP}); use --allow-gaps to keep the longest run")
        # split at the large gaps and keep the longest contiguous run
        cuts = [0] + [g[3] + 1 for g in big] + [len(stamps)]
        best = max(zip(cuts[:-1], cuts[1:]), key=lambda c: offs[c[1] - 1] - offs[c[0]])
        window = (int(offs[best[0]]), int(offs[best[1] - 1]) + 1)
    return timedelta(seconds=base), offs, window, gaps


def _fill(offs, window, values):
    """Place values on the integer grid and interpolate the missing samples."""
    lo, hi = window
    keep = (offs >= lo) & (offs < hi)
    grid = np.arange(lo, hi)
    filled = np.interp(grid, offs[keep], values[keep])
    missing = grid.size - int(np.count_nonzero(keep))
    return filled, keep, missing


def read_price_csv(path, allow_gaps: bool = False, column: str = "price",
                   label: str = "price") -> tuple[TimeSeries, IngestInfo]:
    """Read a ``timestamp,<column>`` CSV into a uniform series.

    Gaps of up to three missing samples are filled by linear interpolation.
    Longer gaps raise unless ``allow_gaps``, which keeps the longest
    contiguous stretch.

    Returns
    -------
    series : TimeSeries
    info : IngestInfo
    """
    p, rows = _read_rows(path, ("timestamp", column))
    lines = [r[0] for r in rows]
    stamps, vals = [], []
    for lineno, (ts, v) in rows:
        try:
            stamps.append(parse_timestamp(ts))
        except ValueError:
            raise ValidationError(f"{p}:{lineno}: unparseable timestamp {ts!r}") from None
        try:
            x = float(v)
        except ValueError:
            raise ValidationError(f"{p}:{lineno}: unparseable {column} {v!r}") from None
        if not np.isfinite(x):
            raise ValidationError(f"{p}:{lineno}: non-finite {column} {v!r}")
        vals.append(x)
    res, offs, window, gaps = _time_axis(p, lines, stamps, allow_gaps)
    filled, keep, missing = _fill(offs, window, np.asarray(vals))
    info = IngestInfo(str(p), len(rows), missing, [g[:3] for g in gaps], int(np.count_nonzero(~keep)))
    if missing:
        log.warning("%s: interpolated %d missing sample(s)", p, missing)
    if info.dropped:
        log.warning("%s: dropped %d sample(s) outside the longest contiguous run", p, info.dropped)
    start = stamps[int(np.flatnonzero(keep)[0])]
    return TimeSeries(filled, res, start, label), info


def ingest_prices(path, allow_gaps: bool = False) -> TimeSeries:
    """Price series from a ``timestamp,price`` CSV (see :func:`read_price_csv`)."""
    return read_price_csv(path, allow_gaps)[0]


def ingest_residual_load(path, allow_gaps: bool = False) -> TimeSeries:
    """Residual load from a ``timestamp,residual_load_mw`` CSV."""
    return read_price_csv(path, allow_gaps, "residual_load_mw", "residual_load_mw")[0]


def read_weather_csv(path, allow_gaps: bool = False) -> tuple[WeatherSeries, IngestInfo]:
    """Weather series from a ``timestamp,f_param,cwt`` CSV.

    Missing samples in short gaps get an interpolated ``f_param`` and the
    weather type of the preceding sample.
    """
    p, rows = _read_rows(path, ("timestamp", "f_param", "cwt"))
    lines = [r[0] for r in rows]
    stamps, fs, types = [], [], []
    for lineno, (ts, f, c) in rows:
        try:
            stamps.append(parse_timestamp(ts))
        except ValueError:
            raise ValidationError(f"{p}:{lineno}: unparseable timestamp {ts!r}") from None
        try:
            x = float(f)
        except ValueError:
            raise ValidationError(f"{p}:{lineno}: unparseable f_param {f!r}") from None
        if not np.isfinite(x) or x < 0:
            raise ValidationError(f"{p}:{lineno}: f_param must be finite and non-negative, got {f!r}")
        label = c.strip()
        if label not in WEATHER_TYPES:
            raise ValidationError(f"{p}:{lineno}: unknown weather type {label!r}")
        fs.append(x)
        types.append(label)
    res, offs, window, gaps = _time_axis(p, lines, stamps, allow_gaps)
    filled, keep, missing = _fill(offs, window, np.asarray(fs))
    grid = np.arange(*window)
    ko = offs[keep]
    kt = np.asarray(types, dtype=object)[keep]
    cwt = kt[np.searchsorted(ko, grid, side="right") - 1]
    info = IngestInfo(str(p), len(rows), missing, [g[:3] for g in gaps], int(np.count_nonzero(~keep)))
    if missing:
        log.warning("%s: interpolated %d missing sample(s)", p, missing)
    start = stamps[int(np.flatnonzero(keep)[0])]
    return WeatherSeries(filled, cwt, res, start), info


def ingest_weather(path, allow_gaps: bool = False) -> WeatherSeries:
    """Weather series from a ``timestamp,f_param,cwt`` CSV."""
    return read_weather_csv(path, allow_gaps)[0]
