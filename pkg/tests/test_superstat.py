import math
from datetime import timedelta

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spotstat.core import TimeSeries
from spotstat.errors import DegenerateDataError, NumericalError, ValidationError
from spotstat.superstat import (crossing_is_robust, default_windows, entropic_index,
                                fit_volatility_distribution, local_skewness_curve, long_time_T,
                                short_time_tau, superstat_pipeline, volatility_series,
                                zero_crossings)
from spotstat.synthetic import ar1


def test_tau_ar1():
    ts = TimeSeries(ar1(2 ** 17, 0.9, np.random.default_rng(21)))
    want = 1.0 / math.log(1.0 / 0.9)
    assert abs(short_time_tau(ts, 200) - want) <= 0.5
    assert abs(short_time_tau(ts, 200, method="fit") - want) <= 0.5


def test_tau_method_validation():
    ts = TimeSeries(np.random.default_rng(1).standard_normal(100))
    with pytest.raises(ValidationError):
        short_time_tau(ts, 10, method="bogus")


def test_uniform_noise_is_symmetric():
    x = np.random.default_rng(22).uniform(-1, 1, 2 ** 16)
    c = local_skewness_curve(TimeSeries(x), [4, 16, 64, 256, 1024])
    assert np.max(np.abs(c.skewness)) < 0.05


def test_exponential_noise_skewness():
    x = np.random.default_rng(23).exponential(1.0, 2 ** 16)
    c = local_skewness_curve(TimeSeries(x), [512, 1024, 2048, 4096, 8192])
    assert abs(c.skewness[-1] - 2.0) <= 0.1


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_skewness_antisymmetric(seed):
    x = np.random.default_rng(seed).exponential(1.0, 800)
    a = local_skewness_curve(TimeSeries(x), [4, 10, 50, 100])
    b = local_skewness_curve(TimeSeries(-x), [4, 10, 50, 100])
    np.testing.assert_array_equal(b.skewness, -a.skewness)
    np.testing.assert_array_equal(b.kurtosis, a.kurtosis)


def test_window_validation():
    ts = TimeSeries(np.random.default_rng(2).standard_normal(800))
    with pytest.raises(ValidationError, match="4 samples"):
        local_skewness_curve(ts, [2, 10])
    with pytest.raises(ValidationError, match="n/8"):
        local_skewness_curve(ts, [10, 101])


def test_linear_crossing():
    dt = np.linspace(24, 240, 217)
    curve = np.column_stack([dt, (dt - 96.0) / 96.0])
    assert long_time_T(curve, (24, 240)) == 96.0


def test_first_crossing_either_direction():
    dt = np.array([24.0, 30.0, 40.0, 50.0, 60.0])
    assert long_time_T(np.column_stack([dt, [-1.0, -0.5, 0.5, -0.5, 1.0]])) == pytest.approx(35.0)
    assert long_time_T(np.column_stack([dt, [1.0, 0.5, 0.0, -0.5, 1.0]])) == 40.0


def test_no_crossing_reports_extrema():
    dt = np.linspace(24, 240, 50)
    with pytest.raises(NumericalError, match="no sign change"):
        long_time_T(np.column_stack([dt, np.full(50, 0.3)]))


def test_early_crossings_separate():
    dt = np.arange(1.0, 100.0)
    s = np.cos(2 * np.pi * dt / 16.0)
    early = zero_crossings(np.column_stack([dt, s]), 0, 24)
    assert early == pytest.approx([4.0, 12.0, 20.0], abs=0.1)


def test_beta_known_variance():
    x = np.random.default_rng(24).normal(0.0, 2.0, 64 * 400)
    b = volatility_series(TimeSeries(x), 400.0)
    assert len(b) == 64
    assert np.all(np.abs(b.values / 0.25 - 1.0) <= 0.3)
    assert abs(b.values.mean() / 0.25 - 1.0) <= 0.05


def test_beta_scaling_exact():
    x = np.random.default_rng(25).standard_normal(4000)
    a = volatility_series(TimeSeries(x), 50.0)
    b = volatility_series(TimeSeries(4.0 * x), 50.0)
    np.testing.assert_array_equal(b.values, a.values / 16.0)


def test_beta_two_regimes():
    rng = np.random.default_rng(26)
    x = np.concatenate([rng.normal(0, 1, 20000), rng.normal(0, 3, 20000)])
    b = volatility_series(TimeSeries(x), 100.0).values
    # two well separated modes in log(beta), each within 20% of the regime value
    split = np.exp(0.5 * (np.log(1.0) + np.log(1.0 / 9.0)))
    low, high = b[b < split], b[b >= split]
    assert low.size == 200 and high.size == 200
    assert abs(np.median(high) - 1.0) <= 0.2
    assert abs(np.median(low) * 9.0 - 1.0) <= 0.2


@settings(max_examples=30, deadline=None)
@given(st.integers(200, 3000), st.integers(8, 25))
def test_beta_windows_tile(n, r):
    if n < 8 * r:
        return
    x = np.random.default_rng(n).standard_normal(n)
    b = volatility_series(TimeSeries(x, timedelta(minutes=15)), r * 0.25)
    assert len(b) == n // r
    assert b.resolution == timedelta(minutes=15 * r)


def test_beta_requirements():
    with pytest.raises(ValidationError, match="need at least 8"):
        volatility_series(TimeSeries(np.arange(100.0)), 5.0)
    with pytest.raises(DegenerateDataError):
        volatility_series(TimeSeries(np.r_[np.zeros(80), np.arange(80.0)]), 10.0)


def test_entropic_index_cases():
    assert entropic_index(np.full(50, 0.7)) == 1.0
    b = np.random.default_rng(27).gamma(2.0, 1.0, 10 ** 4)
    assert abs(entropic_index(b) - 1.5) <= 0.05


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(1e-3, 1e3))
def test_entropic_index_bounds_and_scale(seed, k):
    x = np.random.default_rng(seed).standard_t(4, 4000)
    b = volatility_series(TimeSeries(x), 40.0)
    q = entropic_index(b)
    assert q >= 1.0
    bk = volatility_series(TimeSeries(k * x), 40.0)
    assert entropic_index(bk) == pytest.approx(q, rel=1e-12)


def test_volatility_fit_lognormal_first():
    b = np.random.default_rng(28).lognormal(0.0, 0.5, 10 ** 4)
    fits = fit_volatility_distribution(b)
    assert fits[0].family == "logNormal"


def test_volatility_fit_inverse_gamma():
    rng = np.random.default_rng(29)
    b = 2.0 / rng.gamma(3.0, 1.0, 10 ** 4)
    fits = fit_volatility_distribution(b)
    assert fits[0].family == "inverseGamma"
    assert abs(fits[0].params["c"] - 3.0) <= 0.2


def test_volatility_fit_optional_families():
    b = np.random.default_rng(30).lognormal(0.0, 0.5, 2000)
    fams = {f.family for f in fit_volatility_distribution(b, include_optional=True)}
    assert fams == {"logNormal", "inverseGamma", "gamma", "F"}


def test_volatility_fit_constant():
    with pytest.raises(DegenerateDataError, match="degenerate support"):
        fit_volatility_distribution(np.full(500, 2.0))


def test_white_noise_not_valid():
    x = np.random.default_rng(31).standard_normal(5 * 8760)
    res = superstat_pipeline(TimeSeries(x))
    assert res.valid is False


def test_robust_crossing_needs_significant_skew():
    t = np.array([24.0, 48.0, 72.0, 96.0])
    from spotstat.superstat import LocalMomentCurve
    curve = LocalMomentCurve(t, t.astype(int), np.array([0.01, 0.005, -0.01, -0.02]),
                             np.full(4, 3.0), np.full(4, 0.05), np.full(4, 10), np.zeros(4, int))
    assert not crossing_is_robust(curve, 60.0)
    strong = LocalMomentCurve(t, t.astype(int), np.array([0.5, 0.2, -0.1, -0.2]),
                              np.full(4, 3.0), np.full(4, 0.05), np.full(4, 10), np.zeros(4, int))
    assert crossing_is_robust(strong, 60.0)


def test_default_windows_quarter_hourly():
    ts = TimeSeries(np.zeros(96 * 200), timedelta(minutes=15))
    w = default_windows(ts)
    assert w[0] == 1.0 and w[-1] == 300.0
    np.testing.assert_allclose(np.diff(w), 1.0)
