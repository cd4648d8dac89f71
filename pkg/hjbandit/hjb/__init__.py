from .coefficients import Payoffs, payoffs
from .howard import (
    DEFAULT_MAX_ITER,
    DEFAULT_TOLERANCE,
    StepResult,
    hjb_step_residual,
    howard_implicit,
    howard_stationary,
    pull_control,
)
from .options import SCHEMES, SolverOptions
from .oracle import solve_fixed_n
from .problem import (
    Batched,
    BestArm,
    Discounted,
    FiniteHorizonOptimal,
    PolicyRisk,
    ProblemSpec,
)
from .schemes import (
    ArmwiseSolver,
    HjbCoefficients,
    HybridPullSolver,
    step_explicit,
    step_hybrid,
    step_implicit_howard,
)
from .solver import (
    BatchedSolution,
    Solution,
    policy_map,
    solve_batched,
    solve_best_arm,
    solve_discounted,
    solve_discounted_policy_risk,
    solve_optimal,
    solve_policy_risk,
)

__all__ = [
    # problems
    "Batched",
    "BestArm",
    "Discounted",
    "FiniteHorizonOptimal",
    "PolicyRisk",
    "ProblemSpec",
    "SCHEMES",
    "SolverOptions",
    # solves
    "BatchedSolution",
    "Solution",
    "policy_map",
    "solve_batched",
    "solve_best_arm",
    "solve_discounted",
    "solve_discounted_policy_risk",
    "solve_fixed_n",
    "solve_optimal",
    "solve_policy_risk",
    # building blocks
    "ArmwiseSolver",
    "DEFAULT_MAX_ITER",
    "DEFAULT_TOLERANCE",
    "HjbCoefficients",
    "HybridPullSolver",
    "Payoffs",
    "StepResult",
    "hjb_step_residual",
    "howard_implicit",
    "howard_stationary",
    "payoffs",
    "pull_control",
    "step_explicit",
    "step_hybrid",
    "step_implicit_howard",
]
