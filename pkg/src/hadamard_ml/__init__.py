"""alpha-Mittag-Leffler and alphaL-exponential functions, Hadamard-type fractional
operators, operational solutions and the modified Lamb-Bateman equation."""

__version__ = "0.1.0"

from .errors import DomainError, HadamardMLError, NonConvergence, StepTooSmall  # noqa: E402
from .series_engine import EvalResult, SeriesConfig, Status, sum_series  # noqa: E402
from .special_functions import (  # noqa: E402
    MLParams,
    WrightParams,
    alpha_l_exponential,
    alpha_mittag_leffler,
    alphaexp_laplace_transform,
    generalized_wright,
    l_exponential,
    ml_laplace_transform,
)

__all__ = [
    "DomainError",
    "EvalResult",
    "HadamardMLError",
    "MLParams",
    "NonConvergence",
    "SeriesConfig",
    "Status",
    "StepTooSmall",
    "WrightParams",
    "alpha_l_exponential",
    "alpha_mittag_leffler",
    "alphaexp_laplace_transform",
    "generalized_wright",
    "l_exponential",
    "ml_laplace_transform",
    "sum_series",
]
