"""Greedy posterior-driven variable screening for high-dimensional regression.

The extension module provides the screening engine (incremental Cholesky
updates, O(k^2 + kn + np) per iteration), the exact-posterior reference path,
SIS / HOLP / forward-regression baselines, stopping rules and the synthetic
experiment driver. All indices are 0-based.
"""

from ._core import (
    BaselineResult,
    ConfigError,
    Design,
    InputError,
    NumericalError,
    ScreenResult,
    design,
    design_from_csc,
    ebic_size,
    fr_screen,
    gen_design,
    holp_coefficients,
    holp_rank,
    log_posterior,
    oracle_greedy_path,
    ridge_partials,
    run_experiment,
    screen,
    set_threads,
    sis_rank,
    threads,
)

__all__ = [
    "BaselineResult",
    "ConfigError",
    "Design",
    "InputError",
    "NumericalError",
    "ScreenResult",
    "design",
    "design_from_csc",
    "ebic_size",
    "fr_screen",
    "gen_design",
    "holp_coefficients",
    "holp_rank",
    "log_posterior",
    "oracle_greedy_path",
    "ridge_partials",
    "run_experiment",
    "screen",
    "set_threads",
    "sis_rank",
    "threads",
]

__version__ = "0.1.0"
