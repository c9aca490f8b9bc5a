"""Numerical toolkit for the Riemann xi function: special functions, argument
tracking, zero census and counting, and verification suites."""

from __future__ import annotations

from .errors import NumericalError, XiCensusError

__version__ = "0.1.0"

__all__ = ["NumericalError", "XiCensusError", "__version__"]
