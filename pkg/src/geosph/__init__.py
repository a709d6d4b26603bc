"""Plane-strain SPH for large deformation and failure of geomaterials.

Drucker-Prager elastoplastic soil, no-slip ghost-particle walls, and
per-particle tensile-instability control through a pressure-zone adaptive
cubic B-spline kernel (with conventional and artificial-stress modes for
comparison).
"""

from . import backends
from .config import ConfigError, SimConfig
from .constitutive import MaterialParams
from .kernel import KernelParams
from .particles import ParticleSystem, StepControls
from .runner import RunResult, run
from .stabilizer import StabilizerMode

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "KernelParams",
    "MaterialParams",
    "ParticleSystem",
    "RunResult",
    "SimConfig",
    "StabilizerMode",
    "StepControls",
    "backends",
    "run",
    "__version__",
]
