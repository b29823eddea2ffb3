import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import trapezoid

from oracles import q_gaussian_integral, stable_pdf_quad
from spotstat.distfit.densities import (AlphaStableParams, QGaussianParams, alpha_stable_pdf,
                                        q_exponential, q_gaussian_logpdf, q_gaussian_norm,
                                        q_gaussian_pdf, stable_density)
from spotstat.errors import ValidationError


def test_q_exponential_limits():
    u = np.linspace(-3, 1, 9)
    np.testing.assert_allclose(q_exponential(u, 1.0), np.exp(u))
    # cut-off for q < 1 where 1 + (1-q) u <= 0
    assert q_exponential(-5.0, 0.5) == 0.0


def test_q_gaussian_norm_known_value():
    # q = 2 gives the Cauchy form: N = sqrt(pi) Gamma(1) / Gamma(1/2) ... = pi
    assert q_gaussian_norm(2.0) == pytest.approx(math.pi, rel=1e-14)


@pytest.mark.parametrize("q", [1.0, 3.0, 0.5])
def test_q_gaussian_rejects_q(q):
    with pytest.raises(ValidationError):
        QGaussianParams(q, 1.0)


def test_q_gaussian_peak():
    p = QGaussianParams(1.7, 2.5, 0.3)
    assert q_gaussian_pdf(p, 0.3) == math.sqrt(2.5) / q_gaussian_norm(1.7)


def test_q_gaussian_normalised():
    p = QGaussianParams(1.5, 1.0)
    assert abs(q_gaussian_integral(1.5, 1.0, lambda x: q_gaussian_pdf(p, x)) - 1.0) < 1e-6


def test_q_gaussian_gaussian_limit():
    x = np.linspace(-10, 10, 2001)
    p = QGaussianParams(1.0 + 1e-6, 1.0)
    g = np.sqrt(1.0 / np.pi) * np.exp(-x ** 2)
    assert np.max(np.abs(q_gaussian_pdf(p, x) - g)) < 1e-5


def test_q_gaussian_variance():
    assert QGaussianParams(1.8, 1.0).variance is None
    p = QGaussianParams(1.3, 0.7)
    x = np.linspace(-400, 400, 400001)
    num = trapezoid(x ** 2 * q_gaussian_pdf(p, x), x)
    assert num == pytest.approx(p.variance, rel=1e-3)


@settings(max_examples=100, deadline=None)
@given(st.floats(1.01, 2.9), st.floats(0.05, 20.0), st.floats(-5, 5), st.floats(0, 50))
def test_q_gaussian_symmetry(q, c, mu, d):
    p = QGaussianParams(q, c, mu)
    assert q_gaussian_pdf(p, mu + d) == pytest.approx(q_gaussian_pdf(p, mu - d), rel=1e-12, abs=1e-300)
    assert q_gaussian_logpdf(p, mu + d) <= q_gaussian_logpdf(p, mu) + 1e-12


def test_stable_closed_forms():
    x, f = alpha_stable_pdf(AlphaStableParams(2.0, 1.0))
    assert abs(np.interp(0.0, x, f) - 1.0 / (2.0 * math.sqrt(math.pi))) < 1e-4
    x, f = alpha_stable_pdf(AlphaStableParams(1.0, 1.0))
    assert abs(np.interp(0.0, x, f) - 1.0 / math.pi) < 1e-4


def test_stable_matches_quadrature_at_three():
    sd = stable_density(AlphaStableParams(1.6, 1.0))
    assert abs(sd.pdf(3.0) - stable_pdf_quad(3.0, 1.6)) < 1e-5


def test_stable_cauchy_everywhere():
    sd = stable_density(AlphaStableParams(1.0, 2.0, 1.0), grid=(-60, 60, 2 ** 14))
    cauchy = 2.0 / (math.pi * (4.0 + (sd.x - 1.0) ** 2))
    assert np.max(np.abs(sd.density - cauchy)) < 1e-6


def test_stable_alpha2_matches_gaussian_limit_of_q_gaussian():
    # alpha = 2, c = 1 has variance 2; the q -> 1 q-Gaussian has variance 1/(2c)
    x = np.linspace(-10, 10, 801)
    sd = stable_density(AlphaStableParams(2.0, 1.0))
    qg = q_gaussian_pdf(QGaussianParams(1.0 + 1e-7, 0.25), x)
    assert np.max(np.abs(sd.pdf(x) - qg)) < 1e-4


def test_stable_beyond_grid_uses_tail():
    p = AlphaStableParams(1.5, 1.0)
    sd = stable_density(p)
    x = 200.0
    assert sd.pdf(x) == pytest.approx(stable_pdf_quad(x, 1.5), rel=2e-3)


def test_stable_grid_validation():
    with pytest.raises(ValidationError):
        stable_density(AlphaStableParams(1.5, 1.0), grid=(-5, 5, 2 ** 14))
    with pytest.raises(ValidationError):
        stable_density(AlphaStableParams(1.5, 1.0), grid=(-50, 50, 5000))
    with pytest.raises(ValidationError):
        AlphaStableParams(2.1, 1.0)


@settings(max_examples=15, deadline=None)
@given(st.floats(0.6, 2.0), st.floats(0.2, 5.0))
def test_stable_density_nonnegative_symmetric(alpha, c):
    sd = stable_density(AlphaStableParams(alpha, c))
    assert np.all(sd.density >= 0)
    np.testing.assert_allclose(sd.density, sd.density[::-1], atol=1e-9 * sd.density.max())
