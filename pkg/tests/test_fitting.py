import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from spotstat.core import Histogram, make_histogram
from spotstat.distfit import empirical_histogram, fit_mle, kl_divergence, select_model
from spotstat.errors import DegenerateDataError, FitError, NumericalError, ValidationError
from spotstat.synthetic import q_gaussian_sample


@pytest.fixture(scope="module")
def gaussian_draws():
    return np.random.default_rng(2024).standard_normal(10 ** 5)


def test_gaussian_fit_as_q_gaussian(gaussian_draws):
    fit = fit_mle(gaussian_draws, "qGaussian")
    assert abs(fit.params["q"] - 1.0) <= 0.03
    assert fit.converged and not fit.failed


def test_nested_models_agree_on_gaussian_data(gaussian_draws):
    fits = {f.family: f for f in select_model(gaussian_draws, ["gaussian", "qGaussian"])}
    assert abs(fits["gaussian"].kl_to_empirical - fits["qGaussian"].kl_to_empirical) < 1e-3


def test_gaussian_fit_matches_closed_form(gaussian_draws):
    fit = fit_mle(gaussian_draws, "gaussian")
    assert fit.params["mu"] == pytest.approx(gaussian_draws.mean(), abs=1e-5)
    assert fit.params["sigma"] == pytest.approx(gaussian_draws.std(), rel=1e-5)


def test_trace_is_monotone():
    x = q_gaussian_sample(5000, 1.4, 1.0, 0.0, np.random.default_rng(1))
    for fam in ("qGaussian", "alphaStable", "gaussian"):
        fit = fit_mle(x, fam)
        assert fit.trace.size > 0
        assert np.all(np.diff(fit.trace) >= 0)
        assert fit.trace[-1] == pytest.approx(fit.log_likelihood, rel=1e-12)


def test_pin_mu():
    x = q_gaussian_sample(5000, 1.4, 1.0, 0.5, np.random.default_rng(2))
    fit = fit_mle(x, "qGaussian", pin_mu=0.0)
    assert fit.params["mu"] == 0.0
    with pytest.raises(ValidationError):
        fit_mle(np.abs(x) + 1, "logNormal", pin_mu=0.0)


def test_fit_preconditions():
    with pytest.raises(ValidationError, match="100"):
        fit_mle(np.arange(50.0), "gaussian")
    with pytest.raises(DegenerateDataError):
        fit_mle(np.ones(200), "gaussian")
    with pytest.raises(ValidationError, match="positive"):
        fit_mle(np.linspace(-1, 1, 200), "logNormal")
    with pytest.raises(ValidationError):
        fit_mle(np.linspace(-1, 1, 200), "noSuchFamily")


def test_non_convergence_carries_best_params():
    x = q_gaussian_sample(1000, 1.4, 1.0, 0.0, np.random.default_rng(3))
    with pytest.raises(FitError) as info:
        fit_mle(x, "qGaussian", maxiter=1)
    assert set(info.value.best_params) == {"q", "c", "mu"}
    assert np.isfinite(info.value.best_log_likelihood)


def test_select_model_singleton():
    x = np.random.default_rng(4).standard_normal(500)
    fits = select_model(x, ["gaussian"])
    assert [f.family for f in fits] == ["gaussian"]


def test_select_model_ranks_by_divergence():
    x = q_gaussian_sample(20000, 1.6, 1.0, 0.0, np.random.default_rng(5))
    fits = select_model(x, ["gaussian", "qGaussian"])
    assert fits[0].family == "qGaussian"
    kls = [f.kl_to_empirical for f in fits]
    assert kls == sorted(kls)


def test_kl_self_is_zero():
    h = make_histogram(np.random.default_rng(6).standard_normal(1000), bins=30)
    assert kl_divergence(h, h) == 0.0


def test_kl_four_bins_brute_force():
    edges = np.array([0.0, 1.0, 2.0, 3.0, 4.0])
    r = np.array([0.1, 0.4, 0.3, 0.2])
    s = np.array([0.25, 0.25, 0.25, 0.25])
    emp = Histogram(edges, r, 1.0)
    model = Histogram(edges, s, 1.0)
    want = 0.0
    for ri, si in zip(r, s):
        want += ri * math.log(ri / si) * 1.0
    assert kl_divergence(emp, model) == pytest.approx(want, rel=1e-14)


def test_kl_empty_bins_contribute_nothing():
    edges = np.array([0.0, 1.0, 2.0, 3.0])
    emp = Histogram(edges, np.array([0.5, 0.0, 0.5]), 1.0)
    model = Histogram(edges, np.array([0.25, 0.5, 0.25]), 1.0)
    assert kl_divergence(emp, model) == pytest.approx(math.log(2.0), rel=1e-14)


def test_kl_support_mismatch():
    edges = np.array([0.0, 1.0, 2.0])
    with pytest.raises(NumericalError, match="support"):
        kl_divergence(Histogram(edges, np.array([0.5, 0.5]), 1.0),
                      Histogram(edges, np.array([1.0, 0.0]), 1.0))


@settings(max_examples=80, deadline=None)
@given(arrays(float, 6, elements=st.floats(0.0, 10.0)), arrays(float, 6, elements=st.floats(1e-3, 10.0)))
def test_kl_nonnegative(r, s):
    if r.sum() == 0:
        return
    edges = np.arange(7.0)
    emp = Histogram(edges, r / r.sum(), 1.0)
    assert kl_divergence(emp, Histogram(edges, s, 1.0)) >= 0.0


def test_empirical_histogram_support():
    x = np.random.default_rng(7).standard_normal(1000)
    h = empirical_histogram(x, 201, 8.0)
    assert h.densities.size == 201
    assert h.bin_edges[0] == pytest.approx(x.mean() - 8 * x.std())


def test_positive_families_recover_parameters():
    rng = np.random.default_rng(8)
    x = rng.lognormal(0.3, 0.5, 10 ** 4)
    fit = fit_mle(x, "logNormal")
    assert fit.params["mu"] == pytest.approx(0.3, abs=0.02)
    assert fit.params["s"] == pytest.approx(0.5, abs=0.02)
    g = fit_mle(rng.gamma(2.0, 1.5, 10 ** 4), "gamma")
    assert g.params["k"] == pytest.approx(2.0, rel=0.05)
