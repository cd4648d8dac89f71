from __future__ import annotations

import logging
import math
from typing import Sequence

import numpy as np

from hjbandit.beliefs import (
    ArmModel,
    PriorSpec,
    best_arm_probabilities,
    prob_nonnegative,
)
from hjbandit.errors import IllegalArgumentError

from .abstract import AbstractPolicy, ArrayLike

log = logging.getLogger(__name__)

__all__ = [
    "Thompson",
    "ApproxThompson",
    "UCB",
    "ConstantProb",
    "ScaledPolicy",
    "MultiArmThompson",
]


def _scalar_or_array(value: np.ndarray) -> ArrayLike:
    return float(value) if np.ndim(value) == 0 else value


class Thompson(AbstractPolicy):
    """Thompson sampling: pull with the posterior probability that mu >= 0

    Arguments:
        prior (PriorSpec): prior on the scaled mean reward
        sigma (float): reward standard deviation
    """

    def __init__(self, prior: PriorSpec, sigma: float) -> None:
        if not sigma > 0:
            raise IllegalArgumentError(f"sigma must be positive, got {sigma}")
        self.prior = prior
        self.sigma = sigma

    @property
    def name(self) -> str:
        return "thompson"

    def pull_probability(self, x: ArrayLike, q: ArrayLike, t: ArrayLike) -> ArrayLike:
        return prob_nonnegative(self.prior, self.sigma, x, q)


class ApproxThompson(AbstractPolicy):
    """Thompson sampling on the score-process approximation of the posterior.

    The state ``x`` is the scaled score process. The posterior of the local
    parameter ``h`` is approximated by the normal-rewards posterior with
    ``score_sigma`` (the inverse Fisher information, square-rooted) as the
    reward sd, and the arm is pulled with probability
    ``P(mu_dot * h >= 0 | x, q)``. Under normal rewards with ``mu_dot = 1``
    this is exactly :class:`Thompson`.
    """

    def __init__(
        self, prior: PriorSpec, score_sigma: float, mu_dot: float = 1.0
    ) -> None:
        if not score_sigma > 0:
            raise IllegalArgumentError(f"score_sigma must be positive: {score_sigma}")
        if mu_dot == 0 or not math.isfinite(mu_dot):
            raise IllegalArgumentError("mu_dot must be finite and nonzero")
        self.prior = prior
        self.score_sigma = score_sigma
        self.mu_dot = mu_dot

    @property
    def name(self) -> str:
        return "approx-thompson"

    def pull_probability(self, x: ArrayLike, q: ArrayLike, t: ArrayLike) -> ArrayLike:
        positive = prob_nonnegative(self.prior, self.score_sigma, x, q)
        if self.mu_dot > 0:
            return positive
        return _scalar_or_array(1.0 - np.asarray(positive))


class UCB(AbstractPolicy):
    """Upper confidence bound rule ``1{x/q + sqrt(2 delta ln n / q) >= 0}``.

    Never-pulled states (``q == 0``) have an infinite bonus and pull. With
    ``asymptotic`` set, ``delta * ln n`` is replaced by
    ``ln(1 + j ln(j)**2)`` where ``j = t * n`` counts the elapsed periods.

    Arguments:
        delta (float): exploration weight, positive. Default: 7.8
        n (int): horizon in periods
        asymptotic (bool): use the anytime confidence level. Default: False
    """

    continuous = False

    def __init__(self, n: int, delta: float = 7.8, *, asymptotic: bool = False) -> None:
        if not delta > 0:
            raise IllegalArgumentError(f"UCB delta must be positive, got {delta}")
        if n < 1:
            raise IllegalArgumentError(f"horizon must be at least 1, got {n}")
        self.delta = delta
        self.n = n
        self.asymptotic = asymptotic
        self.time_dependent = asymptotic

    @property
    def name(self) -> str:
        return "ucb-asymptotic" if self.asymptotic else f"ucb(delta={self.delta:g})"

    def _confidence_level(self, t: np.ndarray) -> np.ndarray:
        if not self.asymptotic:
            return np.full(t.shape, self.delta * math.log(self.n))
        j = np.maximum(t * self.n, 1.0)
        return np.log1p(j * np.log(j) ** 2)

    def pull_probability(self, x: ArrayLike, q: ArrayLike, t: ArrayLike) -> ArrayLike:
        x_arr, q_arr, t_arr = np.broadcast_arrays(
            np.asarray(x, dtype=float),
            np.asarray(q, dtype=float),
            np.asarray(t, dtype=float),
        )
        level = self._confidence_level(t_arr)
        pulled = q_arr > 0
        safe_q = np.where(pulled, q_arr, 1.0)
        index = x_arr / safe_q + np.sqrt(2.0 * level / safe_q)
        decision = np.where(pulled, index >= 0, True)
        return _scalar_or_array(decision.astype(np.float64))


class ConstantProb(AbstractPolicy):
    """Pull with a fixed probability ``p`` everywhere"""

    def __init__(self, p: float) -> None:
        if not 0.0 <= p <= 1.0:
            raise IllegalArgumentError(f"pull probability must lie in [0, 1]: {p}")
        self.p = p

    @property
    def name(self) -> str:
        return f"constant(p={self.p:g})"

    def pull_probability(self, x: ArrayLike, q: ArrayLike, t: ArrayLike) -> ArrayLike:
        shape = np.broadcast(np.asarray(x), np.asarray(q), np.asarray(t)).shape
        return _scalar_or_array(np.full(shape, self.p))


class ScaledPolicy(AbstractPolicy):
    """A policy solved for unit reward sd, used under reward sd ``sigma``.

    The state is rescaled as ``x -> x / sigma``; this maps the minimax
    policy of the unit problem to the minimax policy for any ``sigma``.
    """

    def __init__(self, policy: AbstractPolicy, sigma: float) -> None:
        if not sigma > 0:
            raise IllegalArgumentError(f"sigma must be positive, got {sigma}")
        self.policy = policy
        self.sigma = sigma
        self.arms = policy.arms
        self.continuous = policy.continuous
        self.time_dependent = policy.time_dependent

    @property
    def name(self) -> str:
        return f"{self.policy.name}/sigma={self.sigma:g}"

    def pull_probability(self, x: ArrayLike, q: ArrayLike, t: ArrayLike) -> ArrayLike:
        return self.policy.pull_probability(np.asarray(x) / self.sigma, q, t)

    def arm_probabilities(
        self, x: np.ndarray, q: np.ndarray, t: ArrayLike
    ) -> np.ndarray:
        return self.policy.arm_probabilities(np.asarray(x) / self.sigma, q, t)


class MultiArmThompson(AbstractPolicy):
    """Thompson sampling over ``K`` arms: each arm with its posterior
    probability of having the largest mean.
    """

    def __init__(
        self,
        priors: Sequence[PriorSpec],
        arms: ArmModel,
        *,
        quadrature_nodes: int = 64,
    ) -> None:
        arms.check_priors(priors)
        self.priors = tuple(priors)
        self.model = arms
        self.arms = arms.K
        self.quadrature_nodes = quadrature_nodes

    @property
    def name(self) -> str:
        return f"thompson-{self.arms}arm"

    def pull_probability(self, x: ArrayLike, q: ArrayLike, t: ArrayLike) -> ArrayLike:
        if self.arms != 1:
            return super().pull_probability(x, q, t)
        return prob_nonnegative(self.priors[0], self.model.sigma[0], x, q)

    def arm_probabilities(
        self, x: np.ndarray, q: np.ndarray, t: ArrayLike
    ) -> np.ndarray:
        return best_arm_probabilities(
            self.priors, self.model, x, q, self.quadrature_nodes
        )
