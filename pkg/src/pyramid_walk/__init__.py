"""Probabilistic solution of Dirichlet problems for the Laplace equation in
irregular n-sided pyramids, by simulated Wiener trajectories."""
from .boundary import ExactSolution, PiecewiseConstant, PiecewiseFunction, PointSource, evaluate, exact_value
from .estimator import Estimate, error_vs_exact, solve_at
from .geometry import (
    ExitEvent,
    PyramidDomain,
    RegionLabel,
    beta_angles,
    beta_inside,
    build_domain,
    classify_point,
    intersect_step,
)
from .rng import NormalStream
from .walk import WalkConfig, run_trajectory, wiener_step

__version__ = "0.1.0"

__all__ = [
    "Estimate", "ExactSolution", "ExitEvent", "NormalStream", "PiecewiseConstant",
    "PiecewiseFunction", "PointSource", "PyramidDomain", "RegionLabel", "WalkConfig",
    "beta_angles", "beta_inside", "build_domain", "classify_point", "error_vs_exact",
    "evaluate", "exact_value", "intersect_step", "run_trajectory", "solve_at", "wiener_step",
]
