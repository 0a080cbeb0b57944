"""Tikhonov regularization with discrepancy-based parameter and level choice."""

from ._core import (
    ConfigError,
    DiscrepancyBand,
    DomainError,
    Grid,
    check_band,
    closed_form_minimizer,
    loglog_slope,
    minimize_quadratic,
    morozov_alpha,
    pde,
    run_experiment,
    sequential_discrepancy,
    synthdata,
    validate_config,
)

__all__ = [
    "ConfigError",
    "DiscrepancyBand",
    "DomainError",
    "Grid",
    "check_band",
    "closed_form_minimizer",
    "loglog_slope",
    "minimize_quadratic",
    "morozov_alpha",
    "pde",
    "run_experiment",
    "sequential_discrepancy",
    "synthdata",
    "validate_config",
]
