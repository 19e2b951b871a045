"""Stepwise procedures controlling the FDP exceedance probability."""

from ._kfdp import (
    ConfigError,
    DomainError,
    Gamma,
    NumericError,
    bvn_cdf,
    constants,
    exceeds_gamma,
    kfdp_value,
    lr_constants,
    procedure_names,
    simulate,
    step_down,
    step_up,
    two_sided_equicorr_F,
    verify,
)

__all__ = [
    "ConfigError",
    "DomainError",
    "Gamma",
    "NumericError",
    "bvn_cdf",
    "constants",
    "exceeds_gamma",
    "kfdp_value",
    "lr_constants",
    "procedure_names",
    "simulate",
    "step_down",
    "step_up",
    "two_sided_equicorr_F",
    "verify",
]
