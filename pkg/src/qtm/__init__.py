"""Quantum thermal machines built from two coupled qubits.

Spectrum and Gibbs states, Carnot / Otto / Stirling cycle ledgers,
operating-mode classification and parameter sweeps.
"""

__version__ = "0.1.0"

from .classifier import OperationalMode, classify, clausius_residual, performance
from .cycles import CyclePoint, CycleRecord, run_cycle
from .spectral import MachineParams, build_spectrum, entropy_at, gibbs
from .sweep import AxisSpec, GridSpec, locate_boundary, run_grid

__all__ = [
    "AxisSpec",
    "CyclePoint",
    "CycleRecord",
    "GridSpec",
    "MachineParams",
    "OperationalMode",
    "build_spectrum",
    "classify",
    "clausius_residual",
    "entropy_at",
    "gibbs",
    "locate_boundary",
    "performance",
    "run_cycle",
    "run_grid",
]
