"""Command-line front end: ``spotstat <subcommand> --config <path>``."""
from __future__ import annotations

import argparse
import logging
import sys
from typing import Optional, Sequence

from ..errors import NumericalError, ValidationError
from .config import AnalysisConfig, load_config
from .ingest import ingest_prices, ingest_residual_load, ingest_weather
from .report import Report
from .run import SUBCOMMANDS, run

__all__ = ["main", "run", "load_config", "AnalysisConfig", "Report", "ingest_prices",
           "ingest_weather", "ingest_residual_load", "EXIT_OK", "EXIT_VALIDATION", "EXIT_NUMERICAL"]

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 1, 2


def _u64(text: str) -> int:
    try:
        v = int(text, 10)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be in [0, 2**64)")
    return v


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="spotstat",
                                description="Statistical analysis of electricity spot prices.")
    p.add_argument("subcommand", choices=SUBCOMMANDS)
    p.add_argument("--config", required=True, help="JSON configuration file")
    p.add_argument("--out", help="output directory (overrides output_dir)")
    p.add_argument("--allow-gaps", action="store_true",
                   help="keep the longest contiguous run instead of failing on long gaps")
    p.add_argument("--seed", type=_u64, help="unsigned 64-bit seed (overrides seed)")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point; returns the process exit code."""
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        overrides = {"seed": args.seed, "allow_gaps": True if args.allow_gaps else None}
        cfg = load_config(args.config, overrides)
        out = run(args.subcommand, cfg, args.out)
    except ValidationError as exc:
        print(f"spotstat: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"spotstat: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    dest = args.out if args.out is not None else cfg.output_dir
    print(f"wrote {len(out['plot_data'])} plot-data file(s) and report.json to {dest}")
    return EXIT_OK
