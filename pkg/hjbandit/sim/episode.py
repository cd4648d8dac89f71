from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from hjbandit.beliefs import PriorSpec, parametric_sufficient_update
from hjbandit.errors import IllegalArgumentError
from hjbandit.policies import AbstractPolicy
from hjbandit.structs import ReplicationResult, ScoreSufficientStat

from .rewards import RewardFamily
from .rng import replication_stream

log = logging.getLogger(__name__)

__all__ = [
    "EpisodeSettings",
    "EpisodeBatch",
    "simulate_batch",
    "run_episode",
]

Priors = Union[PriorSpec, Sequence[PriorSpec]]


@dataclass(frozen=True)
class EpisodeSettings:
    """How an episode is run and scored.

    Arguments:
        n (int): horizon; rewards have mean ``mu / sqrt(n)``
        beta (float): discount rate. Period ``j`` is weighted by
            ``exp(-beta * j / n)`` and ``horizon_multiple * n`` periods are
            run. Default: None (undiscounted, ``n`` periods)
        horizon_multiple (int): truncation of discounted runs. Default: 10
        realized (bool): score regret from realized rewards instead of the
            mean gap. Both have the same expectation. Default: False
    """

    n: int
    beta: Optional[float] = None
    horizon_multiple: int = 10
    realized: bool = False

    def __post_init__(self) -> None:
        if self.n < 1:
            raise IllegalArgumentError(f"horizon must be at least 1, got {self.n}")
        if self.beta is not None and not self.beta > 0:
            raise IllegalArgumentError(f"discount rate must be positive: {self.beta}")
        if self.horizon_multiple < 1:
            raise IllegalArgumentError("horizon_multiple must be at least 1")

    @property
    def periods(self) -> int:
        return self.n if self.beta is None else self.horizon_multiple * self.n

    def weights(self) -> np.ndarray:
        j = np.arange(self.periods)
        if self.beta is None:
            return np.ones(self.periods)
        return np.exp(-self.beta * j / self.n)


class EpisodeBatch(NamedTuple):
    regret: np.ndarray
    "Cumulative regret of each replication"

    pulls: np.ndarray
    "Pull count of each replication (best-arm pulls with several arms)"

    replications: np.ndarray
    "Replication indices the streams were keyed by"

    def results(self) -> Tuple[ReplicationResult, ...]:
        return tuple(
            ReplicationResult(float(r), int(p), int(i))
            for r, p, i in zip(self.regret, self.pulls, self.replications)
        )


def _draw_mu(
    rng: np.random.Generator, prior: Priors, arms: int
) -> np.ndarray:
    if arms == 1:
        single = prior[0] if isinstance(prior, (list, tuple)) else prior
        return np.asarray(single.sample(rng, 1)[0])
    priors = list(prior)  # type: ignore[arg-type]
    if len(priors) != arms:
        raise IllegalArgumentError(f"{len(priors)} priors given for {arms} arms")
    return np.array([p.sample(rng, 1)[0] for p in priors])


def _draw_streams(
    family: RewardFamily,
    settings: EpisodeSettings,
    seed: int,
    replications: np.ndarray,
    mu: Optional[np.ndarray],
    prior: Optional[Priors],
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    mus, rewards, uniforms = [], [], []
    for position, replication in enumerate(replications):
        rng = replication_stream(seed, int(replication))
        if prior is not None:
            mu_r = _draw_mu(rng, prior, family.arms)
        else:
            assert mu is not None
            mu_r = np.asarray(mu[position], dtype=float)
        mus.append(mu_r)
        rewards.append(family.draw(rng, mu_r, settings.periods))
        uniforms.append(rng.random(settings.periods))
    return np.stack(mus), np.stack(rewards), np.stack(uniforms)


def _one_arm(
    policy: AbstractPolicy,
    family: RewardFamily,
    settings: EpisodeSettings,
    mu: np.ndarray,
    rewards: np.ndarray,
    uniforms: np.ndarray,
) -> Tuple[np.ndarray, np.ndarray]:
    n = settings.n
    root_n = math.sqrt(n)
    reps = mu.shape[0]
    x = np.zeros(reps)
    q = np.zeros(reps)
    regret = np.zeros(reps)
    pulls = np.zeros(reps, dtype=np.int64)
    optimal = (mu >= 0).astype(np.float64)
    for j, weight in enumerate(settings.weights()):
        share = np.asarray(policy.pull_probability(x, q, j / n), dtype=float)
        pull = uniforms[:, j] < share
        action = pull.astype(np.float64)
        y = rewards[:, j]
        if settings.realized:
            regret += weight * (y / root_n) * (optimal - action)
        else:
            regret += weight * (mu / n) * (optimal - action)
        moved = parametric_sufficient_update(
            ScoreSufficientStat(x, q), family.score(y), family.sigma, n
        )
        x = np.where(pull, moved.x, x)
        q = np.where(pull, moved.q, q)
        pulls += pull
    return regret, pulls


def _several_arms(
    policy: AbstractPolicy,
    family: RewardFamily,
    settings: EpisodeSettings,
    mu: np.ndarray,
    rewards: np.ndarray,
    uniforms: np.ndarray,
) -> Tuple[np.ndarray, np.ndarray]:
    n = settings.n
    root_n = math.sqrt(n)
    reps, arms = mu.shape
    rows = np.arange(reps)
    x = np.zeros((reps, arms))
    q = np.zeros((reps, arms))
    regret = np.zeros(reps)
    pulls = np.zeros(reps, dtype=np.int64)
    # argmax keeps the lowest index among tied means
    best = np.argmax(mu, axis=1)
    sigmas = family.sigmas
    for j, weight in enumerate(settings.weights()):
        probs = np.asarray(policy.arm_probabilities(x, q, j / n), dtype=float)
        cumulative = np.cumsum(probs, axis=1)
        chosen = np.minimum(
            np.sum(uniforms[:, j, None] >= cumulative, axis=1), arms - 1
        )
        y = rewards[:, j, :]
        if settings.realized:
            gap = (y[rows, best] - y[rows, chosen]) / root_n
        else:
            gap = (mu[rows, best] - mu[rows, chosen]) / n
        regret += weight * gap
        score = family.score(y)[rows, chosen]
        moved = parametric_sufficient_update(
            ScoreSufficientStat(x[rows, chosen], q[rows, chosen]),
            score,
            sigmas[chosen],
            n,
        )
        x[rows, chosen] = moved.x
        q[rows, chosen] = moved.q
        pulls += chosen == best
    return regret, pulls


def simulate_batch(
    policy: AbstractPolicy,
    family: RewardFamily,
    settings: EpisodeSettings,
    seed: int,
    replications: Sequence[int],
    *,
    mu: Optional[np.ndarray] = None,
    prior: Optional[Priors] = None,
) -> EpisodeBatch:
    """Run one episode per replication index, vectorised over replications.

    Exactly one of ``mu`` (local parameter of each replication; a trailing
    arm axis with several arms) and ``prior`` (drawn per replication) must
    be given.

    Raises:
        InvalidMu: ``mu`` outside the reward family's range
    """
    if (mu is None) == (prior is None):
        raise IllegalArgumentError("pass exactly one of mu and prior")
    if policy.arms != family.arms:
        raise IllegalArgumentError(
            f"policy chooses among {policy.arms} arm(s), rewards have {family.arms}"
        )
    indices = np.asarray(replications, dtype=np.int64)
    if mu is not None:
        mu = np.asarray(mu, dtype=float)
        family.check_mu(mu, settings.n)
    mus, rewards, uniforms = _draw_streams(
        family, settings, seed, indices, mu, prior
    )
    if prior is not None:
        family.check_mu(mus, settings.n)
    if family.arms == 1:
        regret, pulls = _one_arm(policy, family, settings, mus, rewards, uniforms)
    else:
        regret, pulls = _several_arms(policy, family, settings, mus, rewards, uniforms)
    log.debug(
        "Simulated %d episode(s) of %s over %d periods",
        indices.size,
        policy.name,
        settings.periods,
    )
    return EpisodeBatch(regret, pulls, indices)


def run_episode(
    policy: AbstractPolicy,
    mu: Union[float, Sequence[float], None],
    family: RewardFamily,
    n: int,
    seed: int,
    *,
    replication: int = 0,
    prior: Optional[Priors] = None,
    beta: Optional[float] = None,
    realized: bool = False,
    horizon_multiple: int = 10,
) -> ReplicationResult:
    """Regret of a single episode at a fixed ``mu`` (or ``mu`` drawn from
    ``prior`` when ``mu`` is None)"""
    settings = EpisodeSettings(n, beta, horizon_multiple, realized)
    fixed = None if mu is None else np.asarray([mu], dtype=float)
    batch = simulate_batch(
        policy, family, settings, seed, [replication], mu=fixed, prior=prior
    )
    return batch.results()[0]
