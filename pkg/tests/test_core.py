from datetime import datetime, timedelta, timezone

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from spotstat.core import TimeSeries, autocorrelation, make_histogram, moments
from spotstat.errors import DegenerateDataError, ValidationError
from spotstat.synthetic import ar1

finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


def test_timeseries_axis():
    ts = TimeSeries([1.0, 2.0, 3.0], timedelta(minutes=15), datetime(2020, 1, 1, tzinfo=timezone.utc))
    assert ts.resolution_hours == 0.25
    assert ts.timestamps()[2] == datetime(2020, 1, 1, 0, 30, tzinfo=timezone.utc)
    assert ts.duration_hours == 0.75
    with pytest.raises(ValueError):
        ts.values[0] = 5.0


@pytest.mark.parametrize("values", [[1.0, np.nan], [np.inf], []])
def test_timeseries_rejects_bad_values(values):
    with pytest.raises(ValidationError):
        TimeSeries(values)


def test_timeseries_rejects_nonpositive_resolution():
    with pytest.raises(ValidationError):
        TimeSeries([1.0, 2.0], timedelta(0))


def test_moments_constant():
    m = moments([1.0, 1.0, 1.0, 1.0])
    assert m.mean == 1.0 and m.std == 0.0
    assert m.skewness is None and m.kurtosis is None


def test_moments_short_series_has_no_kurtosis():
    m = moments([1.0, 2.0, 4.0])
    assert m.skewness is not None and m.kurtosis is None


def test_moments_symmetric_sample_has_zero_skew():
    a = np.array([0.3, 1.7, 2.2, 5.0])
    assert moments(np.concatenate([-a, a])).skewness == 0.0


def test_moments_normal_kurtosis():
    x = np.random.default_rng(20240101).standard_normal(10 ** 6)
    assert abs(moments(x).kurtosis - 3.0) < 0.05


def test_moments_population_convention():
    x = np.array([1.0, 2.0, 3.0, 4.0, 10.0])
    m = moments(x)
    assert m.std == pytest.approx(np.std(x), rel=1e-14)
    z = (x - x.mean()) / x.std()
    assert m.skewness == pytest.approx(np.mean(z ** 3), rel=1e-12)
    assert m.kurtosis == pytest.approx(np.mean(z ** 4), rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(arrays(float, st.integers(4, 60), elements=finite), st.randoms(use_true_random=False))
def test_moments_permutation_invariant(x, rnd):
    y = x.copy()
    rnd.shuffle(y)
    a, b = moments(x), moments(y)
    assert a.mean == pytest.approx(b.mean, rel=1e-9, abs=1e-9)
    assert a.std == pytest.approx(b.std, rel=1e-9, abs=1e-9)
    if a.skewness is not None and a.std > 1e-3 * max(1.0, abs(a.mean)):
        assert a.skewness == pytest.approx(b.skewness, rel=1e-6, abs=1e-6)
        assert a.kurtosis == pytest.approx(b.kurtosis, rel=1e-6, abs=1e-6)


def test_histogram_uniform_split():
    h = make_histogram([0.0, 1.0, 2.0, 3.0], bins=2, range=(0.0, 4.0))
    np.testing.assert_allclose(h.densities, [0.25, 0.25])


def test_histogram_gaussian_center():
    x = np.random.default_rng(7).standard_normal(10 ** 5)
    h = make_histogram(x, bins=101, range=(-5.0, 5.0))
    assert abs(h.densities[50] - 1.0 / np.sqrt(2 * np.pi)) < 0.02


def test_histogram_degenerate_support():
    with pytest.raises(DegenerateDataError, match="degenerate support"):
        make_histogram([2.0, 2.0, 2.0])


@settings(max_examples=60, deadline=None)
@given(arrays(float, st.integers(2, 200), elements=finite), st.integers(2, 300))
def test_histogram_integrates_to_one(x, bins):
    if np.ptp(x) == 0:
        return
    h = make_histogram(x, bins=bins)
    assert abs(h.integral() - 1.0) < 1e-9


def test_autocorrelation_white_noise():
    ts = TimeSeries(np.random.default_rng(3).standard_normal(2 ** 16))
    lags, c = autocorrelation(ts, 200)
    assert c[0] == 1.0
    assert np.max(np.abs(c[1:])) < 0.02


def test_autocorrelation_ar1():
    ts = TimeSeries(ar1(2 ** 16, 0.9, np.random.default_rng(11)))
    lags, c = autocorrelation(ts, 20)
    k = np.arange(21)
    np.testing.assert_array_equal(lags, k)
    assert np.max(np.abs(c - 0.9 ** k)) < 0.02


def test_autocorrelation_zero_variance():
    with pytest.raises(DegenerateDataError, match="zero-variance series"):
        autocorrelation(TimeSeries(np.ones(10)), 3)


@settings(max_examples=40, deadline=None)
@given(arrays(float, st.integers(3, 120), elements=st.floats(-100, 100)))
def test_autocorrelation_lag0_and_reversal(x):
    if np.std(x) < 1e-6:
        return
    ts = TimeSeries(x)
    _, a = autocorrelation(ts, len(x) - 1)
    _, b = autocorrelation(ts.with_values(x[::-1]), len(x) - 1)
    assert a[0] == 1.0
    np.testing.assert_allclose(a, b, atol=1e-9)
