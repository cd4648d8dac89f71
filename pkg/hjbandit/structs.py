from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Optional, Tuple

from .errors import IllegalArgumentError

__all__ = [
    "State",
    "PosteriorMoments",
    "ScoreSufficientStat",
    "SolveReport",
    "ReplicationResult",
    "RiskProfile",
    "LfpState",
    "GameReport",
]


class State(NamedTuple):
    """A point of the one-armed experiment in diffusion scaling"""

    x: float
    "Cumulative scaled reward (or scaled score process)"

    q: float
    "Fraction of the horizon spent pulling the arm"

    t: float = 0.0
    "Elapsed fraction of the horizon"


class PosteriorMoments(NamedTuple):
    """Posterior moments of the scaled mean reward at a state.

    Fields may be scalars or numpy arrays of matching shape when computed
    over a whole grid.
    """

    mean: float
    "Posterior mean of mu"

    sd: Optional[float]
    "Posterior standard deviation of mu, only set for Gaussian priors"

    mu_plus: float
    "Posterior expectation of max(mu, 0)"


class ScoreSufficientStat(NamedTuple):
    """Asymptotically sufficient statistic of a parametric reward model"""

    x: float
    "Scaled score process value"

    q: float
    "Pull fraction"


class SolveReport(NamedTuple):
    scheme: str
    "One of ``explicit``, ``implicit``, ``hybrid`` or ``stationary``"

    iterations: int
    "Total number of policy (Howard) iterations over the whole solve"

    max_residual: float
    "Largest sup-norm residual of the discrete equations"

    wall_time: float
    "Seconds spent in the solve"

    value_at_origin: float = float("nan")
    "Value function at s0 = (0, 0, 0)"

    stats: Optional[Dict[str, Dict[str, float]]] = None
    "Snapshot of the solver sensors"


class ReplicationResult(NamedTuple):
    cumulative_regret: float
    "Cumulative regret of one episode, in scaled-reward units"

    pulls: int
    "Periods the arm was pulled (several arms: periods spent on the best arm)"

    seed: int
    "Replication index keying the reward stream under the experiment seed"


@dataclass
class RiskProfile:
    """Frequentist risk of a policy as a function of the local parameter mu"""

    mu_grid: List[float]
    mean_regret: List[float]
    iqr: List[Tuple[float, float]]
    stderr: List[float]
    reps: int

    def __post_init__(self) -> None:
        if self.reps <= 0:
            raise ValueError("reps must be positive")
        lengths = {
            len(self.mu_grid),
            len(self.mean_regret),
            len(self.iqr),
            len(self.stderr),
        }
        if len(lengths) != 1:
            raise ValueError("risk profile columns are not aligned")


class LfpState(NamedTuple):
    """Two-point prior searched over by the minimax game"""

    mu_lo: float
    "Negative support point"

    mu_hi: float
    "Positive support point"

    p: float
    "Prior mass on ``mu_hi``"

    iteration: int = 0

    def validate(self) -> "LfpState":
        if not self.mu_lo < 0 < self.mu_hi:
            raise IllegalArgumentError(
                f"support must straddle zero, got ({self.mu_lo}, {self.mu_hi})"
            )
        if not 0.0 < self.p < 1.0:
            raise IllegalArgumentError(
                f"mass on the positive atom must be in (0, 1): {self.p}"
            )
        return self


@dataclass
class GameReport:
    minimax_value: float
    lfp: LfpState
    equilibrium_gap: float
    thompson_value: float = float("nan")
    history: List[LfpState] = field(default_factory=list)

    @property
    def thompson_ratio(self) -> float:
        return self.thompson_value / self.minimax_value
