"""Maximum-likelihood fitting and Kullback-Leibler model ranking."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from ..core import Histogram, SeriesLike, as_values, make_histogram
from ..errors import (DegenerateDataError, FitError, NumericalError, SpotstatError,
                      ValidationError)
from .densities import (AlphaStableParams, QGaussianParams, f_logpdf, gamma_logpdf,
                        gaussian_logpdf, inverse_gamma_logpdf, lognormal_logpdf,
                        q_gaussian_logpdf, stable_density)

__all__ = ["FAMILIES", "DistributionFit", "fit_mle", "kl_divergence",
           "empirical_histogram", "select_model"]

KL_BINS = 201
KL_WIDTH_SIGMAS = 8.0
MIN_SAMPLES = 100
_STABLE_POINTS = 2 ** 14
_STABLE_HALF_WIDTH = 50.0
_STABLE_ALIAS_TOL = 1e-7


def _sigmoid(z):
    return 0.5 * (1.0 + math.tanh(0.5 * z))


def _logit(p):
    return math.log(p / (1.0 - p))


def _iqr(x):
    q75, q25 = np.percentile(x, [75, 25])
    return float(q75 - q25)


@dataclass(frozen=True)
class _Family:
    name: str
    params: tuple
    to_params: Callable
    from_params: Callable
    logpdf: Callable
    starts: Callable
    positive: bool = False
    has_location: bool = False


def _qg_logpdf(p, x):
    return q_gaussian_logpdf(QGaussianParams(p["q"], p["c"], p["mu"]), x)


def _stable_logpdf(p, x):
    mu, c = p["mu"], p["c"]
    grid = (mu - _STABLE_HALF_WIDTH * c, mu + _STABLE_HALF_WIDTH * c, _STABLE_POINTS)
    return stable_density(AlphaStableParams(p["alpha"], c, mu), grid,
                          alias_tol=_STABLE_ALIAS_TOL * c ** -1).logpdf(x)


def _gauss_starts(x):
    return [{"mu": float(np.median(x)), "sigma": float(np.std(x))}]


def _qg_starts(x):
    med, iqr = float(np.median(x)), _iqr(x)
    c0 = 1.0 / (2.0 * (iqr / 1.349) ** 2)
    return [{"q": q0, "c": c0, "mu": med} for q0 in (1.2, 1.5, 1.8)]


def _stable_starts(x):
    med, iqr = float(np.median(x)), _iqr(x)
    return [{"alpha": a0, "c": iqr / 2.0, "mu": med} for a0 in (1.3, 1.6, 1.9)]


def _lognormal_starts(x):
    lx = np.log(x)
    return [{"mu": float(lx.mean()), "s": float(lx.std())}]


def _invgamma_starts(x):
    m, v = float(x.mean()), float(x.var())
    c0 = max(m * m / v + 2.0, 2.1)
    return [{"c": c0, "b": m * (c0 - 1.0)}, {"c": 3.0, "b": 2.0 * float(np.median(x))}]


def _gamma_starts(x):
    m, v = float(x.mean()), float(x.var())
    return [{"k": m * m / v, "theta": v / m}]


def _f_starts(x):
    med = float(np.median(x))
    return [{"d1": d1, "d2": d2, "scale": med} for d1, d2 in ((5.0, 10.0), (20.0, 20.0))]


FAMILIES = {
    "gaussian": _Family(
        "gaussian", ("mu", "sigma"),
        lambda t: {"mu": t[0], "sigma": math.exp(t[1])},
        lambda p: [p["mu"], math.log(p["sigma"])],
        lambda p, x: gaussian_logpdf(x, p["mu"], p["sigma"]),
        _gauss_starts, has_location=True),
    "qGaussian": _Family(
        "qGaussian", ("q", "c", "mu"),
        lambda t: {"q": 1.0 + 2.0 * _sigmoid(t[0]), "c": math.exp(t[1]), "mu": t[2]},
        lambda p: [_logit((p["q"] - 1.0) / 2.0), math.log(p["c"]), p["mu"]],
        _qg_logpdf, _qg_starts, has_location=True),
    "alphaStable": _Family(
        "alphaStable", ("alpha", "c", "mu"),
        lambda t: {"alpha": 2.0 * _sigmoid(t[0]), "c": math.exp(t[1]), "mu": t[2]},
        lambda p: [_logit(p["alpha"] / 2.0), math.log(p["c"]), p["mu"]],
        _stable_logpdf, _stable_starts, has_location=True),
    "logNormal": _Family(
        "logNormal", ("mu", "s"),
        lambda t: {"mu": t[0], "s": math.exp(t[1])},
        lambda p: [p["mu"], math.log(p["s"])],
        lambda p, x: lognormal_logpdf(x, p["mu"], p["s"]),
        _lognormal_starts, positive=True),
    "inverseGamma": _Family(
        "inverseGamma", ("c", "b"),
        lambda t: {"c": math.exp(t[0]), "b": math.exp(t[1])},
        lambda p: [math.log(p["c"]), math.log(p["b"])],
        lambda p, x: inverse_gamma_logpdf(x, p["c"], p["b"]),
        _invgamma_starts, positive=True),
    "gamma": _Family(
        "gamma", ("k", "theta"),
        lambda t: {"k": math.exp(t[0]), "theta": math.exp(t[1])},
        lambda p: [math.log(p["k"]), math.log(p["theta"])],
        lambda p, x: gamma_logpdf(x, p["k"], p["theta"]),
        _gamma_starts, positive=True),
    "F": _Family(
        "F", ("d1", "d2", "scale"),
        lambda t: {"d1": math.exp(t[0]), "d2": math.exp(t[1]), "scale": math.exp(t[2])},
        lambda p: [math.log(p["d1"]), math.log(p["d2"]), math.log(p["scale"])],
        lambda p, x: f_logpdf(x, p["d1"], p["d2"], p["scale"]),
        _f_starts, positive=True),
}


def _family(name) -> _Family:
    try:
        return FAMILIES[name]
    except KeyError:
        raise ValidationError(f"unknown family {name!r}; choose from {sorted(FAMILIES)}") from None


@dataclass(frozen=True, eq=False)
class DistributionFit:
    """Result of a maximum-likelihood fit.

    Attributes
    ----------
    family : str
    params : dict
    log_likelihood : float
    kl_to_empirical : float
        Divergence of the empirical histogram from the fitted density, or
        ``inf`` for a failed fit.
    n : int
        Sample size.
    converged : bool
    trace : ndarray
        Best log-likelihood after each simplex iteration of the winning start.
    histogram : Histogram or None
        Empirical histogram the divergence was computed on.
    error : str or None
        Failure message when the family could not be fitted.
    """

    family: str
    params: dict
    log_likelihood: float
    kl_to_empirical: float
    n: int
    converged: bool = True
    trace: np.ndarray = field(default_factory=lambda: np.empty(0))
    histogram: Optional[Histogram] = None
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.error is not None

    def logpdf(self, x):
        return _family(self.family).logpdf(self.params, np.asarray(x, dtype=float))

    def pdf(self, x):
        return np.exp(self.logpdf(x))

    def to_dict(self) -> dict:
        return {"family": self.family, "params": dict(self.params),
                "log_likelihood": self.log_likelihood, "kl_to_empirical": self.kl_to_empirical,
                "n": self.n, "converged": self.converged, "error": self.error}


def empirical_histogram(series: SeriesLike, bins: int = KL_BINS,
                        width_sigmas: float = KL_WIDTH_SIGMAS,
                        positive: bool = False) -> Histogram:
    """Histogram over ``[mu - w sigma, mu + w sigma]`` used for divergences.

    With ``positive`` the lower edge is raised to 0 so that no bin centre
    falls outside the support of a positive family.
    """
    x = as_values(series)
    mu, sd = float(np.mean(x)), float(np.std(x))
    if not sd > 0:
        raise DegenerateDataError("degenerate support: zero-variance sample")
    lo = mu - width_sigmas * sd
    if positive:
        lo = max(lo, 0.0)
    return make_histogram(x, bins, (lo, mu + width_sigmas * sd))


def kl_divergence(empirical: Histogram, fit) -> float:
    """Binned Kullback-Leibler divergence ``sum r ln(r / s) dx``.

    Parameters
    ----------
    empirical : Histogram
    fit : DistributionFit, Histogram or callable
        Model density. Callables and fits are evaluated at the bin centres; a
        histogram must share the bin edges of ``empirical``.

    Returns
    -------
    float
        Sum over occupied bins. The model values are renormalised to unit
        mass over the histogram's bins so that the result obeys Gibbs'
        inequality.

    Raises
    ------
    NumericalError
        Model density is zero on an occupied bin ("support mismatch").
    """
    r = empirical.densities
    w = empirical.widths
    if isinstance(fit, Histogram):
        if fit.bin_edges.shape != empirical.bin_edges.shape or not np.allclose(
                fit.bin_edges, empirical.bin_edges, rtol=1e-12, atol=0):
            raise ValidationError("histograms must share bin edges")
        s = fit.densities.astype(float)
    else:
        f = fit.pdf if isinstance(fit, DistributionFit) else fit
        s = np.asarray(f(empirical.centers), dtype=float)
    if not np.all(np.isfinite(s)) or np.any(s < 0):
        raise NumericalError("model density must be finite and non-negative")
    occ = r > 0
    if np.any(s[occ] <= 0):
        raise NumericalError("support mismatch: model density is zero on an occupied bin")
    s = s / np.sum(s * w)
    d = float(np.sum(r[occ] * np.log(r[occ] / s[occ]) * w[occ]))
    # non-negative by Gibbs' inequality; clip rounding
    return max(d, 0.0)


def fit_mle(series: SeriesLike, family: str, *, pin_mu: Optional[float] = None,
            bins: int = KL_BINS, width_sigmas: float = KL_WIDTH_SIGMAS,
            maxiter: int = 4000) -> DistributionFit:
    """Maximum-likelihood fit of one family by multi-start Nelder-Mead.

    Parameters
    ----------
    series : TimeSeries or array_like
        At least 100 samples; positive for the positive-support families.
    family : {'gaussian', 'qGaussian', 'alphaStable', 'logNormal', 'inverseGamma', 'gamma', 'F'}
    pin_mu : float, optional
        Hold the location fixed (location families only).
    bins, width_sigmas : int, float
        Binning of the empirical histogram for ``kl_to_empirical``.
    maxiter : int
        Simplex iteration cap per start.

    Returns
    -------
    DistributionFit
        Best of all starts.

    Raises
    ------
    FitError
        No start converged; carries the best parameters seen.
    """
    fam = _family(family)
    x = as_values(series)
    if x.size < MIN_SAMPLES:
        raise ValidationError(f"fit_mle needs at least {MIN_SAMPLES} samples, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise ValidationError("fit_mle needs finite samples")
    if fam.positive and np.any(x <= 0):
        raise ValidationError(f"{family} fit needs strictly positive samples")
    if np.all(x == x[0]):
        raise DegenerateDataError("degenerate support: all samples are equal")
    if pin_mu is not None and not fam.has_location:
        raise ValidationError(f"{family} has no location parameter to pin")

    free = [i for i, p in enumerate(fam.params) if not (pin_mu is not None and p == "mu")]

    def full(theta):
        t = np.zeros(len(fam.params))
        t[free] = theta
        if pin_mu is not None:
            t[fam.params.index("mu")] = pin_mu
        return fam.to_params(t)

    def nll(theta):
        try:
            p = full(theta)
            v = -float(np.sum(fam.logpdf(p, x)))
        except (SpotstatError, OverflowError, ValueError, FloatingPointError):
            return np.inf
        return v if np.isfinite(v) else np.inf

    runs = []
    for start in fam.starts(x):
        if pin_mu is not None:
            start = dict(start, mu=pin_mu)
        theta0 = np.asarray(fam.from_params(start), dtype=float)[free]
        trace = []

        def record(intermediate_result):
            trace.append(-float(intermediate_result.fun))

        with np.errstate(all="ignore"):
            res = minimize(nll, theta0, method="Nelder-Mead", callback=record,
                           options={"maxiter": maxiter * len(free),
                                    "maxfev": 2 * maxiter * len(free),
                                    "xatol": 1e-7, "fatol": 1e-9,
                                    "adaptive": len(free) > 2})
        if np.isfinite(res.fun):
            runs.append((not res.success, float(res.fun), res, trace))
    if not runs:
        raise FitError(f"{family} likelihood is not finite at any start")
    # converged starts first, then the lowest negative log-likelihood
    failed, fun, res, trace = min(runs, key=lambda r: (r[0], r[1]))
    params = {k: float(v) for k, v in full(res.x).items()}
    if failed:
        best = min(runs, key=lambda r: r[1])
        raise FitError(f"{family} fit did not converge from any start",
                       {k: float(v) for k, v in full(best[2].x).items()}, -best[1])
    hist = empirical_histogram(x, bins, width_sigmas, fam.positive)
    fit = DistributionFit(family, params, -fun, float("nan"), int(x.size), True,
                          np.asarray(trace), hist)
    kl = kl_divergence(hist, fit)
    return DistributionFit(family, params, -fun, kl, fit.n, True, fit.trace, hist)


def select_model(series: SeriesLike, families: Sequence[str] = ("qGaussian", "alphaStable"), *,
                 pin_mu: Optional[float] = None, bins: int = KL_BINS,
                 width_sigmas: float = KL_WIDTH_SIGMAS) -> list[DistributionFit]:
    """Fit several families and rank them by divergence from the empirical histogram.

    Families whose fit fails are kept at the end of the list with ``error``
    set and ``kl_to_empirical = inf``.
    """
    fams = list(dict.fromkeys(families))
    if not fams:
        raise ValidationError("select_model needs at least one family")
    for name in fams:
        _family(name)
    x = as_values(series)
    fits = []
    for name in fams:
        try:
            pm = pin_mu if FAMILIES[name].has_location else None
            fits.append(fit_mle(x, name, pin_mu=pm, bins=bins, width_sigmas=width_sigmas))
        except (FitError, NumericalError) as exc:
            params = getattr(exc, "best_params", None) or {}
            fits.append(DistributionFit(name, params, getattr(exc, "best_log_likelihood", float("nan")),
                                        float("inf"), int(x.size), False, error=str(exc)))
    # stable sort keeps the requested order among ties
    return sorted(fits, key=lambda f: (f.failed, f.kl_to_empirical))
