"""Explicit auxiliary-variable pressure-correction solver for 2D
incompressible flow driven by multiplicative trace-class noise, with
companion overdamped-Langevin integrators and a Monte Carlo error harness.
"""

__version__ = "0.1.0"

from .errors import (
    AuxflowError,
    BlowUpError,
    ConfigurationError,
    OutputError,
    UsageError,
)
from .spectral import Grid, SpectralField, SpectralOps

__all__ = [
    "AuxflowError",
    "BlowUpError",
    "ConfigurationError",
    "OutputError",
    "UsageError",
    "Grid",
    "SpectralField",
    "SpectralOps",
    "__version__",
]
