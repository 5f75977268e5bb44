"""Augmented Lagrangian solver for the fused lasso signal approximator."""

from .linalg import SingularSystemError, TridiagonalSystem, solve_tridiagonal
from .loss import CoordinateProblem, LossModel, soft_threshold
from .simulate import NoiseModel, SignalSpec, generate
from .solver import (
    AlmConfig,
    DivergenceError,
    Mode,
    SolveReport,
    SolverState,
    Termination,
    fuse_then_threshold,
    objective,
    solve,
)

__all__ = [
    "AlmConfig", "CoordinateProblem", "DivergenceError", "LossModel", "Mode",
    "NoiseModel", "SignalSpec", "SingularSystemError", "SolveReport",
    "SolverState", "Termination", "TridiagonalSystem", "fuse_then_threshold",
    "generate", "objective", "soft_threshold", "solve", "solve_tridiagonal",
]
__version__ = "0.1.0"
