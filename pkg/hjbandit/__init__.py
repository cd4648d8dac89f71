__version__ = "0.1.0"

from .beliefs import ArmModel, DiscretePrior, GaussianPrior, degenerate, two_point
from .errors import BanditError
from .hjb import (
    Batched,
    BestArm,
    Discounted,
    FiniteHorizonOptimal,
    PolicyRisk,
    SolverOptions,
    solve_batched,
    solve_best_arm,
    solve_discounted,
    solve_optimal,
    solve_policy_risk,
)
from .lattice import GridSpec
from .minimax import MinimaxSettings, search_lfp
from .policies import UCB, Thompson
from .sim import MonteCarloRunner, bayes_risk_mc, frequentist_profile
from .structs import GameReport, LfpState, SolveReport, State

__all__ = [
    # Beliefs
    "ArmModel",
    "DiscretePrior",
    "GaussianPrior",
    "degenerate",
    "two_point",
    # Problems and solvers
    "Batched",
    "BestArm",
    "Discounted",
    "FiniteHorizonOptimal",
    "GridSpec",
    "PolicyRisk",
    "SolverOptions",
    "solve_batched",
    "solve_best_arm",
    "solve_discounted",
    "solve_optimal",
    "solve_policy_risk",
    # Policies
    "Thompson",
    "UCB",
    # Simulation
    "MonteCarloRunner",
    "bayes_risk_mc",
    "frequentist_profile",
    # Minimax
    "MinimaxSettings",
    "search_lfp",
    # Errors
    "BanditError",
    # Structs
    "GameReport",
    "LfpState",
    "SolveReport",
    "State",
]
