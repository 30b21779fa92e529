"""Primal-dual active-set solver for convex quadratic programs."""

from ._core import (
    BudgetExceeded,
    ModelError,
    PreconditionError,
    Problem,
    enumerate,
    parse_problem,
    parse_problem_text,
    profile,
    solve,
    solve_standard,
    strategies,
    write_problem,
    write_problem_file,
)

__all__ = [
    "BudgetExceeded",
    "ModelError",
    "PreconditionError",
    "Problem",
    "enumerate",
    "parse_problem",
    "parse_problem_text",
    "profile",
    "solve",
    "solve_standard",
    "strategies",
    "write_problem",
    "write_problem_file",
]
