from .episode import EpisodeBatch, EpisodeSettings, run_episode, simulate_batch
from .rewards import CenteredBernoulli, GaussianArms, GaussianShift, RewardFamily
from .rng import replication_stream
from .runner import (
    MonteCarloRunner,
    RiskEstimate,
    UcbTuning,
    bayes_risk_mc,
    frequentist_profile,
    tune_ucb,
)

__all__ = [
    # reward laws
    "CenteredBernoulli",
    "GaussianArms",
    "GaussianShift",
    "RewardFamily",
    # episodes
    "EpisodeBatch",
    "EpisodeSettings",
    "replication_stream",
    "run_episode",
    "simulate_batch",
    # estimates
    "MonteCarloRunner",
    "RiskEstimate",
    "UcbTuning",
    "bayes_risk_mc",
    "frequentist_profile",
    "tune_ucb",
]
