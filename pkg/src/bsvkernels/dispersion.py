"""Paraxial phase mismatch inside the crystal and across the air gap.

All wavenumbers are in 1/m, lengths in m. The signal and idler are frequency
degenerate, so ``lambda_s = lambda_i = 2 * lambda_p``.

Longitudinal wavevectors use the paraxial expansion ``k_z = k - q**2 / (2 k)``.
With the collinear mismatch ``delta_k = k_p - 2 k_s`` this gives

    Delta_k(q_s, q_i) = delta_k + (q_s**2 + q_i**2) / (2 k_s)

for the crystal, and the same form with air indices for the gap.
"""

from __future__ import annotations

from dataclasses import dataclass
import math

import numpy as np

# Transverse wavevectors at or beyond k are evanescent.
PARAXIAL_LIMIT = 1.0


def wavenumber(wavelength: float, index: float) -> float:
    """Wavenumber ``2 pi n / lambda`` in 1/m."""
    return 2.0 * math.pi * index / wavelength


@dataclass(frozen=True)
class CrystalSpec:
    """Single nonlinear crystal.

    Attributes:
        length: crystal length in m.
        delta_k: collinear mismatch ``k_p - 2 k_s`` in 1/m.
        pump_wavelength: vacuum pump wavelength in m.
        n_pump: pump refractive index inside the crystal.
        n_signal: signal/idler refractive index inside the crystal.
        interaction_strength: coupling Gamma used when no explicit value is
            passed to the propagator.
        signal_wavelength: vacuum signal wavelength; defaults to twice the pump.
    """

    length: float
    delta_k: float
    pump_wavelength: float
    n_pump: float
    n_signal: float
    interaction_strength: float = 0.0
    signal_wavelength: float | None = None

    def __post_init__(self):
        if not self.length > 0:
            raise ValueError(f"crystal length must be positive, got {self.length}")
        if not self.pump_wavelength > 0:
            raise ValueError("pump wavelength must be positive")
        if not (self.n_pump > 0 and self.n_signal > 0):
            raise ValueError("refractive indices must be positive")
        if not math.isfinite(self.delta_k):
            raise ValueError("delta_k must be finite")
        if self.signal_wavelength is None:
            object.__setattr__(self, "signal_wavelength", 2.0 * self.pump_wavelength)
        elif not math.isclose(self.signal_wavelength, 2.0 * self.pump_wavelength, rel_tol=1e-12):
            raise ValueError("only frequency-degenerate down-conversion is supported "
                             "(signal wavelength must be twice the pump wavelength)")

    @property
    def k_signal(self) -> float:
        return wavenumber(self.signal_wavelength, self.n_signal)

    @property
    def k_pump(self) -> float:
        return wavenumber(self.pump_wavelength, self.n_pump)

    @property
    def k_signal_vacuum(self) -> float:
        return wavenumber(self.signal_wavelength, 1.0)


@dataclass(frozen=True)
class PumpSpec:
    """Gaussian pump with transverse kernel ``exp(-(q_s + q_i)**2 sigma**2 / 2)``.

    ``sigma`` is the intensity-profile width parameter in m. Use
    :meth:`from_fwhm` to build it from the measured intensity FWHM.
    """

    sigma: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"pump width must be positive, got {self.sigma}")

    @classmethod
    def from_fwhm(cls, fwhm: float) -> "PumpSpec":
        return cls(sigma=fwhm / (2.0 * math.sqrt(math.log(2.0))))

    @property
    def fwhm(self) -> float:
        return self.sigma * 2.0 * math.sqrt(math.log(2.0))


@dataclass(frozen=True)
class GapSpec:
    """Air gap between two crystals.

    Attributes:
        distance: gap length in m.
        n_pump_air: refractive index of air at the pump wavelength.
        n_signal_air: refractive index of air at the signal wavelength.
    """

    distance: float
    n_pump_air: float
    n_signal_air: float

    def __post_init__(self):
        if self.distance < 0:
            raise ValueError(f"gap distance must be non-negative, got {self.distance}")
        if not (self.n_pump_air > 0 and self.n_signal_air > 0):
            raise ValueError("air refractive indices must be positive")


def _check_paraxial(q, k, what):
    qmax = float(np.max(np.abs(q))) if np.size(q) else 0.0
    if not np.isfinite(qmax):
        raise ValueError(f"non-finite transverse wavevector in {what}")
    if qmax >= PARAXIAL_LIMIT * k:
        raise ValueError(
            f"|q| = {qmax:.4g} 1/m is outside the paraxial range of {what} "
            f"(limit {PARAXIAL_LIMIT} * k = {PARAXIAL_LIMIT * k:.4g} 1/m)")


def delta_k_crystal(spec: CrystalSpec, q_s, q_i):
    """Phase mismatch ``Delta_k(q_s, q_i)`` inside the crystal, 1/m.

    Broadcasts over ``q_s`` and ``q_i``.
    """
    q_s = np.asarray(q_s, dtype=float)
    q_i = np.asarray(q_i, dtype=float)
    k_s = spec.k_signal
    _check_paraxial(q_s, k_s, "the crystal")
    _check_paraxial(q_i, k_s, "the crystal")
    return spec.delta_k + (q_s**2 + q_i**2) / (2.0 * k_s)


def air_mismatch(gap: GapSpec, spec: CrystalSpec) -> float:
    """Collinear air mismatch ``k_p_air - 2 k_s_air`` in 1/m."""
    k_p = wavenumber(spec.pump_wavelength, gap.n_pump_air)
    k_s = wavenumber(spec.signal_wavelength, gap.n_signal_air)
    return k_p - 2.0 * k_s


def gap_phase(gap: GapSpec, spec: CrystalSpec, q_s, q_i):
    """Phase ``Delta_k'(q_s, q_i) * d`` accumulated across the air gap, rad."""
    q_s = np.asarray(q_s, dtype=float)
    q_i = np.asarray(q_i, dtype=float)
    k_s = wavenumber(spec.signal_wavelength, gap.n_signal_air)
    _check_paraxial(q_s, k_s, "air")
    _check_paraxial(q_i, k_s, "air")
    dk = air_mismatch(gap, spec) + (q_s**2 + q_i**2) / (2.0 * k_s)
    return dk * gap.distance


def crystal_frame_phase(spec: CrystalSpec, q, length: float | None = None):
    """Per-mode share of the crystal mismatch phase, rad.

    Splits ``Delta_k * L`` symmetrically so that
    ``phase(q_s) + phase(q_i) = Delta_k(q_s, q_i) * L``.
    """
    q = np.asarray(q, dtype=float)
    L = spec.length if length is None else length
    return (0.5 * spec.delta_k + q**2 / (2.0 * spec.k_signal)) * L


def gap_frame_phase(gap: GapSpec, spec: CrystalSpec, q):
    """Per-mode share of the gap phase; the air analogue of :func:`crystal_frame_phase`."""
    q = np.asarray(q, dtype=float)
    k_s = wavenumber(spec.signal_wavelength, gap.n_signal_air)
    _check_paraxial(q, k_s, "air")
    return (0.5 * air_mismatch(gap, spec) + q**2 / (2.0 * k_s)) * gap.distance
