"""Exponents and angular profiles of homogeneous p-harmonic functions in cones."""

from ._core import (
    ConvergenceError,
    DomainError,
    NoEigenfunctionError,
    NumericalError,
    RangeError,
    branch_constant,
    criteria_count,
    ergodic_profile,
    gamma_of_opening,
    lambda_curve,
    lambda_point,
    opening_of_gamma,
    p2_cap_eigenvalue,
    p2_exponents,
    run_criterion,
    sector_profile,
    solve_exponent,
)

__all__ = [
    "ConvergenceError",
    "DomainError",
    "NoEigenfunctionError",
    "NumericalError",
    "RangeError",
    "branch_constant",
    "criteria_count",
    "ergodic_profile",
    "gamma_of_opening",
    "lambda_curve",
    "lambda_point",
    "opening_of_gamma",
    "p2_cap_eigenvalue",
    "p2_exponents",
    "run_criterion",
    "sector_profile",
    "solve_exponent",
]
