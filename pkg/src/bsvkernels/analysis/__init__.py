"""Observables computed from transfer states."""

from .covariance import (CovarianceMatrix, IntensitySamples, ReconstructedModes,
                         covariance_analytic, covariance_schmidt_form, empirical_covariance,
                         reconstruct_modes_from_covariance, sample_intensity_profiles)
from .fitting import (CovarianceFit, GainCalibration, calibrate_gain, covariance_formula,
                      fit_covariance_formula)
from .intensity import IntensityProfile, fwhm, half_max_width, intensity
from .interference import fringe_frequency, fringe_period, visibility
from .schmidt import SchmidtDecomposition, mode_fwhm, schmidt_from_state

__all__ = [
    "CovarianceFit", "CovarianceMatrix", "GainCalibration", "IntensityProfile",
    "IntensitySamples", "ReconstructedModes", "SchmidtDecomposition",
    "calibrate_gain", "covariance_analytic", "covariance_formula",
    "covariance_schmidt_form", "empirical_covariance", "fit_covariance_formula",
    "fringe_frequency", "fringe_period", "fwhm", "half_max_width", "intensity",
    "mode_fwhm", "reconstruct_modes_from_covariance", "sample_intensity_profiles",
    "schmidt_from_state", "visibility",
]
