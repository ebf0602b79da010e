"""Phenological dates from satellite vegetation-index time series."""

from ._core import (
    PhenocurveError,
    check_ordering,
    closed_form_phenodates,
    dtw_distance,
    fit_harmonic,
    fit_pixel,
    fpca_fit,
    phenodates_from_model,
    render_spiral,
    run_study,
)

__all__ = [
    "PhenocurveError",
    "check_ordering",
    "closed_form_phenodates",
    "dtw_distance",
    "fit_harmonic",
    "fit_pixel",
    "fpca_fit",
    "phenodates_from_model",
    "render_spiral",
    "run_study",
]

__version__ = "0.3.0"
