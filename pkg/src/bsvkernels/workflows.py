"""Pipelines shared by the command line, the demos and the tests."""

from __future__ import annotations

from dataclasses import replace
import math
from typing import Callable, Sequence

import numpy as np

from .analysis.fitting import GainCalibration, calibrate_gain
from .analysis.intensity import intensity
from .dispersion import CrystalSpec, PumpSpec
from .grid import QGrid
from .propagator import IntegratorOptions, TransferState, propagate_single_crystal

CALIBRATION_GAINS = (0.5, 1.5, 3.0, 4.5, 6.0, 7.5)


def nominal_coupling(spec: CrystalSpec, pump: PumpSpec, gain):
    """Plane-wave estimate of Gamma for gain G: ``G sigma / (L sqrt(2 pi))``.

    ``sqrt(2 pi) / sigma`` is the integral of the pump kernel over one
    wavevector, so ``Gamma sqrt(2 pi) L / sigma`` is the gain a very wide
    pump would give.
    """
    return np.asarray(gain, dtype=float) * pump.sigma / (spec.length * math.sqrt(2.0 * math.pi))


def collinear_curve(spec: CrystalSpec, pump: PumpSpec, grid: QGrid, gammas: Sequence[float],
                    opts: IntegratorOptions | None = None,
                    solver: Callable[..., TransferState] | None = None) -> np.ndarray:
    """Collinear photon density ``N(q = 0)`` for each coupling."""
    solver = solver or (lambda s, p, g, gam: propagate_single_crystal(s, p, g, gam, opts))
    return np.array([intensity(solver(spec, pump, grid, gam)).collinear() for gam in gammas])


def calibrate_coupling(spec: CrystalSpec, pump: PumpSpec, grid: QGrid,
                       gains: Sequence[float] = CALIBRATION_GAINS,
                       opts: IntegratorOptions | None = None, phase_matched: bool = True,
                       solver: Callable[..., TransferState] | None = None):
    """Map coupling Gamma to parametric gain G for a crystal and pump.

    The collinear signal is computed at the plane-wave couplings for
    ``gains`` and fitted with ``B sinh(A Gamma)**2``. With ``phase_matched``
    the fit runs at ``delta_k = 0``, where the collinear growth is a clean
    single-mode law; the resulting ``A`` is then used at any mismatch.

    Returns:
        (GainCalibration, gammas, collinear signal)
    """
    cal_spec = replace(spec, delta_k=0.0) if phase_matched else spec
    gammas = nominal_coupling(spec, pump, gains)
    y = collinear_curve(cal_spec, pump, grid, gammas, opts, solver)
    return calibrate_gain(gammas, y), gammas, y
