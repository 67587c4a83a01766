"""Transport solvers: quantum walk strategies and classical baselines."""

from src.solvers.amplified_walk import AmplifiedWalkSolver, run_amplified_walk
from src.solvers.base_solver import BaseSolver, FluxMap, Normalization, SolverResult
from src.solvers.finite_difference import FiniteDifferenceSolver, run_fd
from src.solvers.kernel import AbsorbMode, exact_step_distribution, expected_walk_flux
from src.solvers.measured_walk import MeasuredWalkSolver, WalkRunReport, run_measured_walk
from src.solvers.monte_carlo import MonteCarloSolver, run_mc
from src.solvers.rng import RngStream
from src.solvers.swap_test import SwapScoreSolver, swap_test_score

__all__ = [
    "AbsorbMode",
    "AmplifiedWalkSolver",
    "BaseSolver",
    "FiniteDifferenceSolver",
    "FluxMap",
    "MeasuredWalkSolver",
    "MonteCarloSolver",
    "Normalization",
    "RngStream",
    "SolverResult",
    "SwapScoreSolver",
    "WalkRunReport",
    "exact_step_distribution",
    "expected_walk_flux",
    "run_amplified_walk",
    "run_fd",
    "run_mc",
    "run_measured_walk",
    "swap_test_score",
]
