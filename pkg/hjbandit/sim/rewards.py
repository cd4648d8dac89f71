from __future__ import annotations

import abc
import math
from typing import Tuple

import numpy as np

from hjbandit.beliefs import ArmModel
from hjbandit.errors import IllegalArgumentError, InvalidMu

__all__ = ["RewardFamily", "GaussianShift", "CenteredBernoulli", "GaussianArms"]


class RewardFamily(abc.ABC):
    """Reward law of an arm with mean ``mu / sqrt(n)`` in an n-period run.

    The simulator tracks the scaled score process: a reward ``y`` moves the
    state by ``sigma**2 * score(y) / sqrt(n)``, where ``sigma**2`` is the
    inverse Fisher information at the null mean. For normal rewards this
    is ``y / sqrt(n)``.
    """

    #: number of arms simulated side by side
    arms: int = 1

    @property
    @abc.abstractmethod
    def name(self) -> str:
        pass

    @property
    @abc.abstractmethod
    def sigma(self) -> float:
        """Reward sd at the null mean, ``1/sqrt(Fisher information)``"""

    @property
    def sigmas(self) -> np.ndarray:
        """Reward sd of every arm"""
        return np.full(self.arms, self.sigma)

    @abc.abstractmethod
    def draw(self, rng: np.random.Generator, mu: np.ndarray, n: int) -> np.ndarray:
        """``n`` rewards for every entry of ``mu``, shape ``(*mu.shape, n)``"""

    @abc.abstractmethod
    def score(self, y: np.ndarray) -> np.ndarray:
        pass

    def check_mu(self, mu: np.ndarray, n: int) -> None:
        if not np.all(np.isfinite(mu)):
            raise InvalidMu("local parameters must be finite")


class GaussianShift(RewardFamily):
    """Normal rewards ``N(mu / sqrt(n), sigma**2)``"""

    def __init__(self, sigma: float = 5.0) -> None:
        if not (sigma > 0 and math.isfinite(sigma)):
            raise IllegalArgumentError(f"reward sd must be positive, got {sigma}")
        self._sigma = sigma

    @property
    def name(self) -> str:
        return f"gaussian(sigma={self._sigma:g})"

    @property
    def sigma(self) -> float:
        return self._sigma

    def draw(self, rng: np.random.Generator, mu: np.ndarray, n: int) -> np.ndarray:
        noise = rng.standard_normal(size=(*np.shape(mu), n))
        return np.asarray(mu)[..., None] / math.sqrt(n) + self._sigma * noise

    def score(self, y: np.ndarray) -> np.ndarray:
        return y / self._sigma**2


class CenteredBernoulli(RewardFamily):
    """Rewards of +-1 with ``P(+1) = (1 + mu / sqrt(n)) / 2``.

    At the null the rewards have mean 0 and variance 1, so the score is
    ``y`` itself and ``sigma == 1``.
    """

    @property
    def name(self) -> str:
        return "centered-bernoulli"

    @property
    def sigma(self) -> float:
        return 1.0

    def check_mu(self, mu: np.ndarray, n: int) -> None:
        super().check_mu(mu, n)
        if np.any(np.abs(mu) > math.sqrt(n)):
            raise InvalidMu(f"|mu| / sqrt(n) must not exceed 1 (n={n})")

    def draw(self, rng: np.random.Generator, mu: np.ndarray, n: int) -> np.ndarray:
        uniform = rng.random(size=(*np.shape(mu), n))
        p_up = 0.5 * (1.0 + np.asarray(mu)[..., None] / math.sqrt(n))
        return np.where(uniform < p_up, 1.0, -1.0)

    def score(self, y: np.ndarray) -> np.ndarray:
        return y


class GaussianArms(RewardFamily):
    """Independent normal rewards for each of ``K`` arms.

    ``mu`` carries the arm index on its last axis; draws have shape
    ``(*mu.shape[:-1], n, K)``.
    """

    def __init__(self, model: ArmModel) -> None:
        self.model = model
        self.arms = model.K

    @property
    def name(self) -> str:
        return f"gaussian-{self.arms}arm"

    @property
    def sigma(self) -> float:
        return self.model.sigma[0]

    @property
    def sigmas(self) -> np.ndarray:
        return np.asarray(self.model.sigma)

    def check_mu(self, mu: np.ndarray, n: int) -> None:
        super().check_mu(mu, n)
        if np.shape(mu)[-1:] != (self.arms,):
            raise InvalidMu(f"expected {self.arms} local parameters per draw")

    def draw(self, rng: np.random.Generator, mu: np.ndarray, n: int) -> np.ndarray:
        batch: Tuple[int, ...] = np.shape(mu)[:-1]
        noise = rng.standard_normal(size=(*batch, n, self.arms))
        return np.asarray(mu)[..., None, :] / math.sqrt(n) + self.sigmas * noise

    def score(self, y: np.ndarray) -> np.ndarray:
        return y / self.sigmas**2
