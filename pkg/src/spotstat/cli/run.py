"""Pipeline orchestration for the command-line front end."""
from __future__ import annotations

import logging
import math
from pathlib import Path

import numpy as np

from .. import __version__
from ..core import TimeSeries, moments
from ..distfit import empirical_histogram, select_model
from ..emd import decompose, detrend
from ..errors import ValidationError
from ..mfdfa import MfdfaConfig, banded_analysis
from ..superstat import superstat_pipeline
from ..weather import align, condition_on_f, cwt_segments, merit_order_fit
from .config import AnalysisConfig
from .ingest import read_price_csv, read_weather_csv
from .report import Report, sha256_file, write_csv

__all__ = ["SUBCOMMANDS", "run"]

log = logging.getLogger(__name__)

SUBCOMMANDS = ("detrend", "fit-dist", "mfdfa", "superstat", "weather", "all")


class _Context:
    """Inputs and shared intermediate results of one run."""

    def __init__(self, cfg: AnalysisConfig, out: Path):
        self.cfg = cfg
        self.out = out
        self.files: list[str] = []
        self.ingest: dict = {}
        self.price, info = read_price_csv(cfg.input_path("prices"), cfg["allow_gaps"])
        self.ingest["prices"] = info
        self._detrended = None

    def csv(self, name, header, rows):
        write_csv(self.out / name, header, rows)
        self.files.append(name)

    def detrended(self):
        if self._detrended is None:
            d = self.cfg["detrend"]
            dec = decompose(self.price, d["max_imfs"], d["sift_tolerance"])
            det, trend = detrend(self.price, d["n_slowest"], decomposition=dec)
            self._detrended = (dec, det, trend)
        return self._detrended


def _stamp(ts: TimeSeries):
    return [t.strftime("%Y-%m-%dT%H:%M:%SZ") for t in ts.timestamps()]


def _run_detrend(ctx: _Context) -> dict:
    dec, det, trend = ctx.detrended()
    stamps = _stamp(ctx.price)
    ctx.csv("detrend_series.csv", ["timestamp", "price", "trend", "detrended"],
            zip(stamps, ctx.price.values, trend.values, det.values))
    k = len(dec.imfs)
    cols = [imf.values for imf in dec.imfs] + [dec.residual.values]
    ctx.csv("imfs.csv", ["timestamp"] + [f"imf_{i + 1}" for i in range(k)] + ["residual"],
            zip(stamps, *cols))
    err = float(np.max(np.abs(dec.reconstruct() - ctx.price.values)))
    return {"n_imfs": k, "n_slowest_removed": ctx.cfg["detrend"]["n_slowest"],
            "sift_counts": list(dec.sift_counts), "completeness_error": err,
            "imf_zero_crossings": [int(np.count_nonzero(np.diff(np.signbit(m.values)))) for m in dec.imfs],
            "moments_raw": moments(ctx.price).to_dict(), "moments_detrended": moments(det).to_dict()}


def _run_fit_dist(ctx: _Context) -> dict:
    _, det, _ = ctx.detrended()
    f = ctx.cfg["distfit"]
    fits = select_model(det, f["families"], pin_mu=f["pin_mu"], bins=f["bins"],
                        width_sigmas=f["width_sigmas"])
    hist = empirical_histogram(det, f["bins"], f["width_sigmas"])
    x = hist.centers
    cols = [fit.pdf(x) if not fit.failed else np.full(x.size, np.nan) for fit in fits]
    ctx.csv("distribution_fits.csv", ["x", "empirical"] + [fit.family for fit in fits],
            zip(x, hist.densities, *cols))
    rows = []
    for fit in fits:
        rows.extend((fit.family, i, v) for i, v in enumerate(fit.trace))
    ctx.csv("fit_traces.csv", ["family", "iteration", "log_likelihood"], rows)
    return {"ranking": [fit.family for fit in fits],
            "fits": [fit.to_dict() for fit in fits],
            "histogram": {"bins": f["bins"], "width_sigmas": f["width_sigmas"],
                          "range": [float(hist.bin_edges[0]), float(hist.bin_edges[-1])]},
            "moments": moments(det).to_dict()}


def _run_mfdfa(ctx: _Context) -> dict:
    _, det, _ = ctx.detrended()
    m = ctx.cfg["mfdfa"]
    n = len(det)
    if m["scales"] is None:
        config = MfdfaConfig.for_length(n, m["poly_order"], m["powers"])
    else:
        base = MfdfaConfig.for_length(n, m["poly_order"], m["powers"])
        config = MfdfaConfig(tuple(int(s) for s in m["scales"]), base.powers, m["poly_order"])
    res = banded_analysis(det, ctx.cfg.bands, config)
    s = res.surface
    ctx.csv("fluctuation.csv", ["scale_samples", "scale_hours"] + [f"F_q{q:.6g}" for q in s.powers],
            zip(s.scales, s.scales_hours, *s.fluctuation))
    rows = []
    for b in res.bands:
        label = f"{b.band_hours[0]:g}-{b.band_hours[1]:g}h"
        sp = b.spectrum
        rows.extend(zip([label] * sp.powers.size, sp.powers, b.h, b.stderr, sp.alpha, sp.f))
    ctx.csv("spectrum.csv", ["band", "q", "h", "h_stderr", "alpha", "f"], rows)
    return {"edge_rule": res.edge_rule, "poly_order": config.poly_order,
            "n_scales": int(s.scales.size), "n_powers": int(s.powers.size),
            "bands": [{"band_hours": [b.band_hours[0], None if math.isinf(b.band_hours[1]) else b.band_hours[1]],
                       "n_scales": int(b.scales.size), "H": b.H, "H_stderr": b.H_stderr,
                       "width_alpha": b.spectrum.width_alpha, "width_f": b.spectrum.width_f,
                       "folded": b.spectrum.folded} for b in res.bands]}


def _run_superstat(ctx: _Context) -> dict:
    _, det, _ = ctx.detrended()
    s = ctx.cfg["superstat"]
    res = superstat_pipeline(det, tuple(s["search_range_hours"]), tau_method=s["tau_method"],
                             include_optional=s["include_optional_families"])
    if res.acf is not None:
        ctx.csv("acf.csv", ["lag_hours", "acf"], zip(res.acf_lags, res.acf))
    if res.curve is not None:
        c = res.curve
        ctx.csv("local_moments.csv", ["window_hours", "window_samples", "skewness", "skew_stderr",
                                      "kurtosis", "n_segments", "n_skipped"],
                zip(c.windows_hours, c.windows_samples, c.skewness, c.skew_stderr, c.kurtosis,
                    c.n_segments, c.n_skipped))
    if res.beta_series is not None:
        b = res.beta_series
        ctx.csv("beta_series.csv", ["timestamp", "beta"], zip(_stamp(b), b.values))
        if res.beta_acf is not None:
            ctx.csv("beta_acf.csv", ["lag_hours", "acf"], zip(res.beta_acf_lags, res.beta_acf))
        fits = [f for f in res.beta_fits if not f.failed]
        if fits and fits[0].histogram is not None:
            h = fits[0].histogram
            ctx.csv("beta_histogram.csv", ["beta", "empirical"] + [f.family for f in fits],
                    zip(h.centers, h.densities, *[f.pdf(h.centers) for f in fits]))
    curve = res.curve
    return {"tau_hours": res.tau, "tau_method": s["tau_method"], "T_hours": res.T,
            "search_range_hours": list(res.search_range),
            "early_crossings_hours": list(res.early_crossings),
            "q_bar": res.q_bar, "beta_window_count": None if res.beta_series is None else len(res.beta_series),
            "beta_fits": [f.to_dict() for f in res.beta_fits],
            "robust_crossing": res.robust_crossing,
            "slower_volatility_decay": res.slower_volatility_decay,
            "valid": res.valid, "n_windows": None if curve is None else int(curve.windows_hours.size),
            "errors": dict(res.errors)}


def _run_weather(ctx: _Context) -> dict:
    cfg = ctx.cfg
    w = cfg["weather"]
    out: dict = {}
    _, det, _ = ctx.detrended()
    wpath = cfg.input_path("weather")
    if wpath is not None:
        weather, info = read_weather_csv(wpath, cfg["allow_gaps"])
        ctx.ingest["weather"] = info
        joined = align(ctx.price, weather)
        stats = condition_on_f(joined, det, ctx.price, w["f_bins"])
        out["alignment"] = {"samples": len(joined), "dropped_before": joined.dropped_before,
                            "dropped_after": joined.dropped_after}
        out["f_bins"] = [s.to_dict() for s in stats]
        keys = ["label", "f_lo", "f_hi", "sample_count", "mean", "std", "skewness", "kurtosis",
                "negative_count", "high_price_count", "low_count"]
        ctx.csv("f_bins.csv", keys,
                [[s.label, s.bin[0], s.bin[1], s.sample_count, s.moments.mean, s.moments.std,
                  s.moments.skewness, s.moments.kurtosis, s.negative_count, s.high_price_count,
                  int(s.low_count)] for s in stats])
        cwt_out, rows = [], []
        for label in w["labels"]:
            for g in w["persistence_hours"]:
                segs, pooled = cwt_segments(joined, det, label, g, raw=ctx.price)
                cwt_out.append({"label": label, "min_persistence_hours": g, "n_segments": len(segs),
                                "pooled": None if pooled is None else pooled.to_dict()})
                rows.extend([label, g, s.start_index, s.sample_count, s.moments.mean, s.moments.std,
                             s.moments.skewness, s.negative_count, s.high_price_count]
                            for s in segs)
        out["cwt"] = cwt_out
        ctx.csv("cwt_segments.csv", ["label", "min_persistence_hours", "start_index", "sample_count",
                                     "mean", "std", "skewness", "negative_count", "high_price_count"],
                rows)
    rpath = cfg.input_path("residual_load")
    if rpath is not None:
        rl, info = read_price_csv(rpath, cfg["allow_gaps"], "residual_load_mw", "residual_load_mw")
        ctx.ingest["residual_load"] = info
        # restrict both series to their common span
        shift = (rl.start - ctx.price.start) / ctx.price.resolution
        if rl.resolution != ctx.price.resolution or shift != int(shift):
            raise ValidationError("residual load must share the price time grid")
        i0 = max(0, int(shift))
        i1 = min(len(ctx.price), int(shift) + len(rl))
        if i1 - i0 < 1:
            raise ValidationError("price and residual load do not overlap")
        p = ctx.price.slice(i0, i1)
        r = rl.slice(i0 - int(shift), i1 - int(shift))
        fit = merit_order_fit(p, r, w["merit_order_bins"])
        ld = fit.log_density
        lc = 0.5 * (fit.load_edges[1:] + fit.load_edges[:-1])
        pc = 0.5 * (fit.price_edges[1:] + fit.price_edges[:-1])
        ctx.csv("merit_order.csv", ["residual_load_mw", "price", "count", "log10_density"],
                [[lc[i], pc[j], int(fit.counts[i, j]), ld[i, j]]
                 for i in range(lc.size) for j in range(pc.size)])
        out["merit_order"] = {"slope": fit.slope, "intercept": fit.intercept,
                              "slope_stderr": fit.slope_stderr,
                              "intercept_stderr": fit.intercept_stderr, "rvalue": fit.rvalue,
                              "samples": len(p), "bins": w["merit_order_bins"]}
    if not out:
        raise ValidationError("weather analysis needs inputs.weather or inputs.residual_load")
    return out


_STAGES = {
    "detrend": _run_detrend,
    "fit-dist": _run_fit_dist,
    "mfdfa": _run_mfdfa,
    "superstat": _run_superstat,
    "weather": _run_weather,
}


def run(subcommand: str, cfg: AnalysisConfig, out_dir=None) -> Report:
    """Run one analysis (or ``all``) and write ``report.json`` plus plot data.

    Returns
    -------
    Report
        Also written to ``<out_dir>/report.json``.
    """
    if subcommand not in SUBCOMMANDS:
        raise ValidationError(f"unknown subcommand {subcommand!r}")
    out = Path(out_dir) if out_dir is not None else cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    ctx = _Context(cfg, out)
    names = list(_STAGES) if subcommand == "all" else [subcommand]
    sections = {}
    for name in names:
        log.info("running %s", name)
        sections[name.replace("-", "_")] = _STAGES[name](ctx)
    inputs = {}
    for key in ("prices", "weather", "residual_load"):
        p = cfg.input_path(key)
        if p is not None:
            inputs[key] = {"file": p.name, "sha256": sha256_file(p)}
    data = {
        "subcommand": subcommand,
        "provenance": {"tool": "spotstat", "version": __version__, "inputs": inputs,
                       "config": cfg.echo()},
        "series": {"samples": len(ctx.price), "resolution_minutes": ctx.price.resolution_minutes,
                   "start": ctx.price.start.strftime("%Y-%m-%dT%H:%M:%SZ"),
                   "end": ctx.price.end.strftime("%Y-%m-%dT%H:%M:%SZ")},
        "ingest": {k: {kk: vv for kk, vv in v.to_dict().items() if kk != "path"}
                   for k, v in ctx.ingest.items()},
        "plot_data": sorted(ctx.files),
        **sections,
    }
    report = Report(data)
    report.write(out / "report.json")
    return report
