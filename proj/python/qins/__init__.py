"""Spectral solver for a quasi-incompressible diffuse interface model."""

from ._qins import (
    Closures,
    ConfigError,
    Grid,
    PhysParams,
    check_h1_h2,
    parse_config,
    ray_angle,
    rho_hat,
    run_contraction,
    run_lincheck,
    run_simulate,
    run_spectrum,
    spectrum_constant_coeff,
    spectrum_numeric,
)

__all__ = [
    "Closures",
    "ConfigError",
    "Grid",
    "PhysParams",
    "check_h1_h2",
    "parse_config",
    "ray_angle",
    "rho_hat",
    "run_contraction",
    "run_lincheck",
    "run_simulate",
    "run_spectrum",
    "spectrum_constant_coeff",
    "spectrum_numeric",
]
