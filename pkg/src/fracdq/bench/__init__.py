"""Benchmark catalog, error metrics and case runners."""
from .catalog import CATALOG, BenchmarkCase, CaseDefaults, DerivativeCase, ShapeRule, get_case
from .metrics import conv_rate, error_norms, shape_param
from .runner import (
    RESULTS_HEADER,
    CaseResult,
    attach_rates,
    make_nodes,
    read_results,
    results_csv,
    run_derivative_case,
    run_pde_case,
    solve_case,
    write_results,
    write_solution_dump,
)

__all__ = [
    "CATALOG",
    "BenchmarkCase",
    "CaseDefaults",
    "CaseResult",
    "DerivativeCase",
    "RESULTS_HEADER",
    "ShapeRule",
    "attach_rates",
    "conv_rate",
    "error_norms",
    "get_case",
    "make_nodes",
    "read_results",
    "results_csv",
    "run_derivative_case",
    "run_pde_case",
    "shape_param",
    "solve_case",
    "write_results",
    "write_solution_dump",
]
