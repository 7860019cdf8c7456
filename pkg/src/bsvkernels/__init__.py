"""Bright squeezed vacuum from high-gain parametric down-conversion.

Solves the integro-differential equations for the Bogoliubov kernels of the
signal and idler fields on a one-dimensional transverse wavevector grid, for
one crystal or two crystals separated by an air gap, and analyses the
resulting intensity, Schmidt modes and intensity covariance.
"""

from .dispersion import CrystalSpec, GapSpec, PumpSpec, delta_k_crystal, gap_phase
from .grid import QGrid, default_q_max, make_grid, pump_kernel
from .propagator import (IntegratorOptions, TransferState, apply_gap, compose,
                         propagate_single_crystal, propagate_two_crystal, symplectic_defect)

__version__ = "0.1.0"

__all__ = [
    "CrystalSpec", "GapSpec", "IntegratorOptions", "PumpSpec", "QGrid", "TransferState",
    "apply_gap", "compose", "default_q_max", "delta_k_crystal", "gap_phase", "make_grid",
    "propagate_single_crystal", "propagate_two_crystal", "pump_kernel", "symplectic_defect",
]
