"""Riemann-Siegel Z(t), its zeros, and a Friedmann model with R(t) = |Z(t)|."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AccuracyNotAttainable,
    AtZeroOfZ,
    ConfigError,
    InsufficientTable,
    IoError,
    MissedZeros,
    NotPositiveAtCenter,
    OrderViolation,
    ParseError,
    SanityError,
    TooCloseToZero,
    ZetaCosmoError,
)
from .riemann_siegel import DEFAULT_CONFIG, EvalConfig, ZetaPoint, chi, theta, z_eval, z_values  # noqa: E402
from .zero_engine import ZeroTable, find_stationary_points, find_zeros, gap_midpoints  # noqa: E402

__all__ = [
    "__version__",
    "AccuracyNotAttainable",
    "AtZeroOfZ",
    "ConfigError",
    "InsufficientTable",
    "IoError",
    "MissedZeros",
    "NotPositiveAtCenter",
    "OrderViolation",
    "ParseError",
    "SanityError",
    "TooCloseToZero",
    "ZetaCosmoError",
    "DEFAULT_CONFIG",
    "EvalConfig",
    "ZetaPoint",
    "chi",
    "theta",
    "z_eval",
    "z_values",
    "ZeroTable",
    "find_stationary_points",
    "find_zeros",
    "gap_midpoints",
]
