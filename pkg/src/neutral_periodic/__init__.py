"""Periodic solutions of a neutral parabolic delay equation on (0, 1).

Sine-spectral discretization, a periodic linear solver, Picard iteration on
the fixed-point map, hypothesis arithmetic and a method-of-steps oracle.
"""
from .hypotheses import (HypothesisReport, Inequality, Verdict, build_report, check_example51,
                         check_mild, check_regularity, compute_constants, contraction_constant)
from .ivp import HistorySegment, Trajectory, distance_to_periodic, history_from_periodic, simulate
from .periodic import PeriodicTrajectory, mild_identity_residual, periodic_solve, trajectory_norm
from .problem import (ManufacturedSolution, ProblemSpec, build_problem, manufactured_problem,
                      parse_recipe)
from .solver import SolveResult, apply_Q, fixed_point_residual, picard_solve
from .spectral import Convention

__all__ = [
    "Convention", "HistorySegment", "HypothesisReport", "Inequality", "ManufacturedSolution",
    "PeriodicTrajectory", "ProblemSpec", "SolveResult", "Trajectory", "Verdict", "apply_Q",
    "build_problem", "build_report", "check_example51", "check_mild", "check_regularity",
    "compute_constants", "contraction_constant", "distance_to_periodic", "fixed_point_residual",
    "history_from_periodic", "manufactured_problem", "mild_identity_residual", "parse_recipe",
    "periodic_solve", "picard_solve", "simulate", "trajectory_norm",
]
