"""Wideband THz RIS link simulator and beamforming optimizer."""

__version__ = "0.1.0"

from .config import ConfigError, Geometry, SolverError, SystemConfig

__all__ = [
    "ConfigError",
    "Geometry",
    "SolverError",
    "SystemConfig",
    "__version__",
]
