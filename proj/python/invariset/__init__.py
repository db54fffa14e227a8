"""Maximal constraint-admissible invariant sets for linear and switched
linear systems, with S-procedure certificates solved as eigenvalue
minimization."""

from ._invariset import (
    IterationBudgetExceeded,
    ValidationError,
    brute_force_r,
    compute,
    evaluate_r,
    jsr_upper_bound,
    lambda_max,
    lift_map,
    lift_vector,
    membership,
    monomial_exponents,
    polyhedral_kmin_2d,
    simulate,
    solve_certificate,
)

__all__ = [
    "IterationBudgetExceeded",
    "ValidationError",
    "brute_force_r",
    "compute",
    "evaluate_r",
    "jsr_upper_bound",
    "lambda_max",
    "lift_map",
    "lift_vector",
    "membership",
    "monomial_exponents",
    "polyhedral_kmin_2d",
    "simulate",
    "solve_certificate",
]
