from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Tuple, Union

import numpy as np
from scipy import special

from hjbandit.errors import IllegalArgumentError

__all__ = [
    "GaussianPrior",
    "DiscretePrior",
    "PriorSpec",
    "ArmModel",
    "two_point",
    "degenerate",
    "discretize_gaussian",
]

# tolerance on the total mass of a discrete prior
MASS_TOLERANCE = 1e-12


@dataclass(frozen=True)
class GaussianPrior:
    """Normal prior N(mean, sd**2) on the scaled mean reward mu.

    Arguments:
        mean (float): prior mean in scaled-reward units. Default: 0
        sd (float): prior standard deviation, must be positive. Default: 50
    """

    mean: float = 0.0
    sd: float = 50.0

    def __post_init__(self) -> None:
        if not (self.sd > 0 and math.isfinite(self.sd)):
            raise IllegalArgumentError(f"prior sd must be positive, got {self.sd}")
        if not math.isfinite(self.mean):
            raise IllegalArgumentError(f"prior mean must be finite, got {self.mean}")

    @property
    def variance(self) -> float:
        return self.sd * self.sd

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.normal(self.mean, self.sd, size=size)

    def scaled(self, factor: float) -> GaussianPrior:
        return GaussianPrior(self.mean * factor, self.sd * abs(factor))


@dataclass(frozen=True)
class DiscretePrior:
    """Finite-support prior on mu.

    ``atoms`` holds ``(mu_i, p_i)`` pairs sorted strictly increasing in
    ``mu_i``. Probabilities must be nonnegative and sum to one.
    """

    atoms: Tuple[Tuple[float, float], ...]
    support: np.ndarray = field(init=False, repr=False, compare=False)
    mass: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        atoms = tuple((float(mu), float(p)) for mu, p in self.atoms)
        if not atoms:
            raise IllegalArgumentError("discrete prior needs at least one atom")
        support = np.array([mu for mu, _ in atoms])
        mass = np.array([p for _, p in atoms])
        if not np.all(np.isfinite(support)):
            raise IllegalArgumentError("atom locations must be finite")
        if np.any(np.diff(support) <= 0):
            raise IllegalArgumentError("atoms must be sorted strictly increasing")
        if np.any(mass < 0):
            raise IllegalArgumentError("atom probabilities must be nonnegative")
        if abs(math.fsum(mass) - 1.0) > MASS_TOLERANCE:
            raise IllegalArgumentError(
                f"atom probabilities sum to {math.fsum(mass)!r}, not 1"
            )
        support.setflags(write=False)
        mass.setflags(write=False)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "mass", mass)

    @property
    def mean(self) -> float:
        return float(self.support @ self.mass)

    @property
    def variance(self) -> float:
        centred = self.support - self.mean
        return float(centred * centred @ self.mass)

    @property
    def is_degenerate(self) -> bool:
        return len(self.atoms) == 1

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return rng.choice(self.support, size=size, p=self.mass)

    def scaled(self, factor: float) -> DiscretePrior:
        if factor <= 0:
            raise IllegalArgumentError("support can only be rescaled by factor > 0")
        return DiscretePrior(tuple((mu * factor, p) for mu, p in self.atoms))


PriorSpec = Union[GaussianPrior, DiscretePrior]


def two_point(mu_lo: float, mu_hi: float, p: float) -> DiscretePrior:
    """Prior with mass ``1 - p`` on ``mu_lo`` and ``p`` on ``mu_hi``"""
    return DiscretePrior(((mu_lo, 1.0 - p), (mu_hi, p)))


def degenerate(mu: float) -> DiscretePrior:
    return DiscretePrior(((mu, 1.0),))


def discretize_gaussian(
    prior: GaussianPrior, atoms: int = 10_000, width: float = 8.0
) -> DiscretePrior:
    """Fine discrete approximation of a Gaussian prior on ``mean +- width*sd``.

    Masses are the normal probabilities of the cells around each atom, so the
    result is a proper distribution for any ``atoms >= 1``.
    """
    if atoms < 1:
        raise IllegalArgumentError("atoms must be positive")
    if atoms == 1:
        return degenerate(prior.mean)
    z = np.linspace(-width, width, atoms)
    edges = np.concatenate(([-np.inf], 0.5 * (z[1:] + z[:-1]), [np.inf]))
    mass = np.diff(special.ndtr(edges))
    mass = mass / math.fsum(mass)
    # fsum-normalized masses still carry last-digit error; absorb it
    mass[np.argmax(mass)] += 1.0 - math.fsum(mass)
    support = prior.mean + prior.sd * z
    return DiscretePrior(tuple(zip(support.tolist(), mass.tolist())))


@dataclass(frozen=True)
class ArmModel:
    """Reward noise of each arm.

    ``sigma[k]`` is the reward standard deviation of arm ``k``. A one-armed
    problem (arm against a known zero-mean outside option) has ``K == 1``.
    """

    sigma: Tuple[float, ...] = (5.0,)

    def __post_init__(self) -> None:
        sigma = tuple(float(s) for s in self.sigma)
        if not sigma:
            raise IllegalArgumentError("at least one arm is required")
        if not all(s > 0 and math.isfinite(s) for s in sigma):
            raise IllegalArgumentError(f"all reward sds must be positive: {sigma}")
        object.__setattr__(self, "sigma", sigma)

    @classmethod
    def single(cls, sigma: float) -> ArmModel:
        return cls((sigma,))

    @classmethod
    def homogeneous(cls, sigma: float, arms: int) -> ArmModel:
        return cls((sigma,) * arms)

    @property
    def K(self) -> int:  # noqa: N802
        return len(self.sigma)

    def check_priors(self, priors: Sequence[PriorSpec]) -> None:
        if len(priors) != self.K:
            raise IllegalArgumentError(
                f"{len(priors)} priors given for {self.K} arms"
            )
