"""Learning coefficients of Poisson mixtures: exact values, identity checks and simulations."""

from ._core import (
    AmbiguityError,
    BudgetExceeded,
    ConfigError,
    DomainError,
    NumericalError,
    TuningError,
    annihilation_check,
    config_hash,
    elem_sym_coeffs,
    f_coeffs,
    f_coeffs_multi,
    fit_lambda,
    h_function,
    kl_mean_error,
    local_lambda,
    log_loss,
    mixture_pmf,
    posterior_rate_mean,
    regular_reference,
    rlct_closed_form,
    rlct_enumerate,
    run_experiment,
    sample,
    sq_surrogate,
    variety_membership,
    verify_polynomials,
    verify_ratio,
    verify_variety,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
