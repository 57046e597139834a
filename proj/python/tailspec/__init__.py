"""Spectral measure estimation for bivariate extremes."""

from ._core import (
    AsyLogisticModel,
    EstimatorKind,
    InputError,
    LogisticModel,
    NumericalError,
    SmoothedSpectral,
    SpectralEstimate,
    bootstrap_band,
    chi,
    chibar,
    cv_concentration,
    el_weights,
    empirical_weights,
    estimate,
    euclidean_weights,
    exceedance_angles,
    ise,
    phi_transform,
    pseudo_polar,
    rank_transform,
    run_experiment,
)

__all__ = [
    "AsyLogisticModel",
    "EstimatorKind",
    "InputError",
    "LogisticModel",
    "NumericalError",
    "SmoothedSpectral",
    "SpectralEstimate",
    "bootstrap_band",
    "chi",
    "chibar",
    "cv_concentration",
    "el_weights",
    "empirical_weights",
    "estimate",
    "euclidean_weights",
    "exceedance_angles",
    "ise",
    "phi_transform",
    "pseudo_polar",
    "rank_transform",
    "run_experiment",
]

__version__ = "0.1.0"
