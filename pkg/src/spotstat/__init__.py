"""Heavy-tail, multifractal and superstatistical analysis of electricity spot prices."""
__version__ = "0.1.0"

from .core import Histogram, MomentSummary, TimeSeries, autocorrelation, make_histogram, moments
from .emd import EmdDecomposition, decompose, detrend
from .errors import (DegenerateDataError, FitError, NumericalError, SpotstatError,
                     ValidationError)

__all__ = [
    "__version__", "TimeSeries", "Histogram", "MomentSummary", "moments", "make_histogram",
    "autocorrelation", "EmdDecomposition", "decompose", "detrend", "SpotstatError",
    "ValidationError", "DegenerateDataError", "NumericalError", "FitError",
]
