from __future__ import annotations

import abc
import logging
from typing import Union

import numpy as np

from hjbandit.structs import State

log = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


class AbstractPolicy(abc.ABC):
    """A rule mapping the state of the experiment to an action distribution.

    One-armed policies return the probability of pulling the arm, vectorised
    over arrays of states. Policies with ``arms > 1`` return a probability
    distribution over arms on a trailing axis instead.

    Policies are immutable once built and safe to share between simulation
    workers.
    """

    #: number of arms the policy chooses between (1 means arm vs outside option)
    arms: int = 1
    #: continuous in the state, so the linear risk PDE characterises its risk
    continuous: bool = True
    #: depends on t; PDE evaluation then reassembles the operator every step
    time_dependent: bool = False

    @property
    @abc.abstractmethod
    def name(self) -> str:
        """.name should be a short string identifying the policy family"""

    def pull_probability(self, x: ArrayLike, q: ArrayLike, t: ArrayLike) -> ArrayLike:
        """Probability of pulling the arm at states ``(x, q, t)``

        Arguments:
            x (float or ndarray): scaled cumulative reward
            q (float or ndarray): pull fraction
            t (float or ndarray): elapsed fraction of the horizon

        Returns:
            float or ndarray with values in [0, 1]
        """
        raise NotImplementedError(f"{self.name} is not a one-armed policy")

    def arm_probabilities(
        self, x: np.ndarray, q: np.ndarray, t: ArrayLike
    ) -> np.ndarray:
        """Distribution over arms; ``x`` and ``q`` carry arms on the last axis"""
        raise NotImplementedError(f"{self.name} is not a multi-armed policy")

    def act(self, s: State) -> float:
        """Pull probability at a single state"""
        return float(self.pull_probability(s.x, s.q, s.t))

    def __repr__(self) -> str:
        return f"<{self.__class__.__name__} {self.name}>"
