from .abstract import AbstractPolicy
from .boundary import (
    StoppingBoundary,
    extract_stopping_boundary,
    lipschitz_estimate,
    thompson_continuity_check,
)
from .optimal import GridControlPolicy, OptimalFromValue, PiecewiseConstantTable
from .rules import (
    UCB,
    ApproxThompson,
    ConstantProb,
    MultiArmThompson,
    ScaledPolicy,
    Thompson,
)

__all__ = [
    "AbstractPolicy",
    # families
    "ApproxThompson",
    "ConstantProb",
    "MultiArmThompson",
    "ScaledPolicy",
    "Thompson",
    "UCB",
    # grid policies
    "GridControlPolicy",
    "OptimalFromValue",
    "PiecewiseConstantTable",
    # diagnostics
    "StoppingBoundary",
    "extract_stopping_boundary",
    "lipschitz_estimate",
    "thompson_continuity_check",
]
