"""Declarative analysis configuration read from JSON."""
from __future__ import annotations

import copy
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

from ..distfit import FAMILIES
from ..errors import ValidationError
from ..weather import WEATHER_TYPES

__all__ = ["DEFAULTS", "AnalysisConfig", "load_config"]

DEFAULTS: dict = {
    "inputs": {"prices": None, "weather": None, "residual_load": None},
    "output_dir": "spotstat-out",
    "seed": 0,
    "allow_gaps": False,
    "detrend": {"n_slowest": 3, "sift_tolerance": 0.05, "max_imfs": None},
    "distfit": {"families": ["gaussian", "qGaussian", "alphaStable"], "bins": 201,
                "width_sigmas": 8.0, "pin_mu": None},
    "mfdfa": {"bands_hours": [[0.0, 12.0], [12.0, 48.0], [48.0, None]], "powers": None,
              "scales": None, "poly_order": 1},
    "superstat": {"search_range_hours": [24.0, 240.0], "tau_method": "crossing",
                  "include_optional_families": False},
    "weather": {"f_bins": 10, "labels": ["W", "Anticyclonic"],
                "persistence_hours": [12.0, 24.0], "merit_order_bins": 50},
}


def _merge(base: dict, over: dict, where: str = "") -> dict:
    out = copy.deepcopy(base)
    for k, v in over.items():
        key = f"{where}{k}"
        if k not in base:
            raise ValidationError(f"unknown config key {key!r}")
        if isinstance(base[k], dict):
            if not isinstance(v, dict):
                raise ValidationError(f"config key {key!r} must be an object")
            out[k] = _merge(base[k], v, key + ".")
        else:
            out[k] = v
    return out


def _positive_int(v, name, minimum=1):
    if isinstance(v, bool) or not isinstance(v, int) or v < minimum:
        raise ValidationError(f"{name} must be an integer >= {minimum}")


@dataclass(frozen=True)
class AnalysisConfig:
    """Validated configuration.

    ``settings`` holds the merged JSON object; input paths are resolved
    against ``base_dir``.
    """

    settings: dict
    base_dir: Path

    def __getitem__(self, key):
        return self.settings[key]

    def input_path(self, name: str) -> Optional[Path]:
        p = self.settings["inputs"].get(name)
        if p is None:
            return None
        p = Path(p)
        return p if p.is_absolute() else self.base_dir / p

    @property
    def output_dir(self) -> Path:
        p = Path(self.settings["output_dir"])
        return p if p.is_absolute() else self.base_dir / p

    @property
    def bands(self) -> list:
        return [(float(lo), math.inf if hi is None else float(hi))
                for lo, hi in self.settings["mfdfa"]["bands_hours"]]

    def echo(self) -> dict:
        """Settings that determine the analysis, for the report."""
        s = copy.deepcopy(self.settings)
        s.pop("output_dir", None)
        return s

    @classmethod
    def from_dict(cls, data: dict, base_dir=".", overrides: Optional[dict] = None) -> "AnalysisConfig":
        if not isinstance(data, dict):
            raise ValidationError("config must be a JSON object")
        s = _merge(DEFAULTS, data)
        for k, v in (overrides or {}).items():
            if v is not None:
                s[k] = v
        cfg = cls(s, Path(base_dir))
        cfg.validate()
        return cfg

    def validate(self):
        s = self.settings
        if not s["inputs"].get("prices"):
            raise ValidationError("config needs inputs.prices")
        for name in ("prices", "weather", "residual_load"):
            p = self.input_path(name)
            if p is not None and not p.is_file():
                raise ValidationError(f"input file not found: {p}")
        if isinstance(s["seed"], bool) or not isinstance(s["seed"], int) or not 0 <= s["seed"] < 2 ** 64:
            raise ValidationError("seed must be an unsigned 64-bit integer")
        d = s["detrend"]
        _positive_int(d["n_slowest"], "detrend.n_slowest", 0)
        if not (isinstance(d["sift_tolerance"], (int, float)) and d["sift_tolerance"] > 0):
            raise ValidationError("detrend.sift_tolerance must be positive")
        if d["max_imfs"] is not None:
            _positive_int(d["max_imfs"], "detrend.max_imfs")
        f = s["distfit"]
        if not f["families"]:
            raise ValidationError("distfit.families must not be empty")
        for fam in f["families"]:
            if fam not in FAMILIES:
                raise ValidationError(f"unknown family {fam!r}")
        _positive_int(f["bins"], "distfit.bins", 2)
        if not f["width_sigmas"] > 0:
            raise ValidationError("distfit.width_sigmas must be positive")
        m = s["mfdfa"]
        if not m["bands_hours"]:
            raise ValidationError("mfdfa.bands_hours must not be empty")
        for band in m["bands_hours"]:
            if len(band) != 2 or band[0] is None or band[0] < 0 or (
                    band[1] is not None and band[1] <= band[0]):
                raise ValidationError(f"invalid mfdfa band {band}")
        _positive_int(m["poly_order"], "mfdfa.poly_order")
        lo, hi = s["superstat"]["search_range_hours"]
        if not 0 < lo < hi:
            raise ValidationError("superstat.search_range_hours must satisfy 0 < lo < hi")
        if s["superstat"]["tau_method"] not in ("crossing", "fit"):
            raise ValidationError("superstat.tau_method must be 'crossing' or 'fit'")
        w = s["weather"]
        for lab in w["labels"]:
            if lab not in WEATHER_TYPES:
                raise ValidationError(f"unknown weather type {lab!r}")
        if any(g < 0 for g in w["persistence_hours"]):
            raise ValidationError("weather.persistence_hours must be non-negative")
        fb = w["f_bins"]
        if isinstance(fb, int):
            _positive_int(fb, "weather.f_bins", 2)
        elif not (isinstance(fb, list) and len(fb) >= 3):
            raise ValidationError("weather.f_bins must be an integer >= 2 or a list of >= 3 edges")


def load_config(path, overrides: Optional[dict] = None) -> AnalysisConfig:
    """Read and validate a JSON config; ``overrides`` replace top-level keys."""
    p = Path(path)
    if not p.is_file():
        raise ValidationError(f"config file not found: {p}")
    try:
        data: Any = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{p}: invalid JSON ({exc})") from None
    return AnalysisConfig.from_dict(data, p.parent, overrides)
