import logging
from datetime import datetime, timedelta, timezone

import numpy as np
import pytest

from spotstat.cli.ingest import (ingest_prices, ingest_residual_load, ingest_weather,
                                 parse_timestamp, read_price_csv)
from spotstat.errors import ValidationError


def write(path, header, rows):
    path.write_text("\n".join([header] + rows) + "\n")
    return path


def hourly(n, skip=(), start=datetime(2020, 1, 1, tzinfo=timezone.utc)):
    out = []
    for k in range(n):
        if k in skip:
            continue
        out.append(f"{(start + timedelta(hours=k)).strftime('%Y-%m-%dT%H:%M:%SZ')},{k * 1.5}")
    return out


def test_well_formed(tmp_path):
    ts = ingest_prices(write(tmp_path / "p.csv", "timestamp,price", hourly(4)))
    assert len(ts) == 4
    assert ts.resolution == timedelta(hours=1)
    np.testing.assert_array_equal(ts.values, [0.0, 1.5, 3.0, 4.5])


def test_one_missing_hour(tmp_path, caplog):
    with caplog.at_level(logging.WARNING):
        ts, info = read_price_csv(write(tmp_path / "p.csv", "timestamp,price", hourly(6, skip={2})))
    assert len(ts) == 6 and ts.values[2] == 3.0
    assert info.interpolated == 1
    assert len([r for r in caplog.records if "interpolated" in r.message]) == 1


def test_long_gap(tmp_path):
    path = write(tmp_path / "p.csv", "timestamp,price", hourly(20, skip={5, 6, 7, 8, 9}))
    with pytest.raises(ValidationError, match=r"2020-01-01T04:00:00\+00:00.*2020-01-01T10:00:00\+00:00"):
        ingest_prices(path)
    ts, info = read_price_csv(path, allow_gaps=True)
    assert len(ts) == 10
    assert ts.start == datetime(2020, 1, 1, 10, tzinfo=timezone.utc)
    assert info.dropped == 5


def test_non_monotone(tmp_path):
    rows = hourly(4)
    rows[2], rows[3] = rows[3], rows[2]
    with pytest.raises(ValidationError, match=r"p\.csv:5: timestamps must increase"):
        ingest_prices(write(tmp_path / "p.csv", "timestamp,price", rows))


def test_mixed_resolution(tmp_path):
    rows = hourly(6)
    rows.insert(3, "2020-01-01T02:30:00Z,7.0")
    with pytest.raises(ValidationError, match="mixed resolutions"):
        ingest_prices(write(tmp_path / "p.csv", "timestamp,price", rows))


def test_unparseable_rows(tmp_path):
    rows = hourly(4)
    rows[1] = rows[1].split(",")[0] + ",12;5"
    with pytest.raises(ValidationError, match=r":3: unparseable price"):
        ingest_prices(write(tmp_path / "p.csv", "timestamp,price", rows))
    with pytest.raises(ValidationError, match=r":2: unparseable timestamp"):
        ingest_prices(write(tmp_path / "q.csv", "timestamp,price", ["yesterday,1.0"]))


def test_missing_column_and_file(tmp_path):
    with pytest.raises(ValidationError, match="missing column"):
        ingest_prices(write(tmp_path / "p.csv", "time,price", hourly(3)))
    with pytest.raises(ValidationError, match="nothere.csv"):
        ingest_prices(tmp_path / "nothere.csv")


def test_timezone_offsets_become_utc():
    assert parse_timestamp("2020-01-01T01:00:00+01:00") == datetime(2020, 1, 1, tzinfo=timezone.utc)
    assert parse_timestamp("2020-01-01T00:00:00") == datetime(2020, 1, 1, tzinfo=timezone.utc)


def test_weather_rows(tmp_path):
    rows = ["2020-01-01T00:00:00Z,1.5,W", "2020-01-01T01:00:00Z,0.0,Anticyclonic",
            "2020-01-01T02:00:00Z,3.0,NE"]
    w = ingest_weather(write(tmp_path / "w.csv", "timestamp,f_param,cwt", rows))
    assert len(w) == 3 and list(w.cwt) == ["W", "Anticyclonic", "NE"]


def test_weather_domain(tmp_path):
    with pytest.raises(ValidationError, match="non-negative"):
        ingest_weather(write(tmp_path / "w.csv", "timestamp,f_param,cwt",
                             ["2020-01-01T00:00:00Z,-1.0,W"]))
    with pytest.raises(ValidationError, match="unknown weather type 'WSW'"):
        ingest_weather(write(tmp_path / "v.csv", "timestamp,f_param,cwt",
                             ["2020-01-01T00:00:00Z,1.0,WSW"]))


def test_weather_gap_keeps_previous_type(tmp_path):
    rows = ["2020-01-01T00:00:00Z,1.0,W", "2020-01-01T02:00:00Z,3.0,N",
            "2020-01-01T03:00:00Z,3.0,N", "2020-01-01T04:00:00Z,3.0,N"]
    w = ingest_weather(write(tmp_path / "w.csv", "timestamp,f_param,cwt", rows))
    assert list(w.cwt) == ["W", "W", "N", "N", "N"] and w.f_param[1] == 2.0


def test_residual_load(tmp_path):
    rows = [r.replace(",", ",1000") for r in hourly(3)]
    rl = ingest_residual_load(write(tmp_path / "r.csv", "timestamp,residual_load_mw", rows))
    assert len(rl) == 3
