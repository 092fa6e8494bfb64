"""Bottleneck asymmetric TSP approximation via thin trees and bounded shortcuts."""

from .constructions import (
    build_counterexample,
    build_extreme_point,
    check_two_connectivity,
    gen_random_metric,
    verify_counterexample,
    verify_extreme_point,
)
from .estimator import BottleneckATSP, check_cost_matrix
from .exceptions import BatspError, InfeasibleRelaxation, TriangleViolation
from .heldkarp import find_tau_star, separate_cut, solve_feasibility, solve_symmetric_hk
from .instance import MetricInstance, hop_distance, threshold_graph, validate_metric
from .oracle import exact_bottleneck, power_hamiltonian
from .solver import PipelineReport, SolverConfig, solve_batsp, verify_solution

__version__ = "0.1.0"

__all__ = [
    "BatspError",
    "BottleneckATSP",
    "InfeasibleRelaxation",
    "MetricInstance",
    "PipelineReport",
    "SolverConfig",
    "TriangleViolation",
    "build_counterexample",
    "build_extreme_point",
    "check_cost_matrix",
    "check_two_connectivity",
    "exact_bottleneck",
    "find_tau_star",
    "gen_random_metric",
    "hop_distance",
    "power_hamiltonian",
    "separate_cut",
    "solve_batsp",
    "solve_feasibility",
    "solve_symmetric_hk",
    "threshold_graph",
    "validate_metric",
    "verify_counterexample",
    "verify_extreme_point",
    "verify_solution",
]
