from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Tuple, Union

from hjbandit.beliefs import ArmModel, PriorSpec
from hjbandit.errors import IllegalArgumentError
from hjbandit.policies.abstract import AbstractPolicy

__all__ = [
    "ProblemSpec",
    "FiniteHorizonOptimal",
    "PolicyRisk",
    "Batched",
    "Discounted",
    "BestArm",
]

# batch length must be an integer number of time steps to this tolerance
_MULTIPLE_TOLERANCE = 1e-9
# posterior sd at q_max must be below this fraction of the prior sd
POSTERIOR_COLLAPSE = 0.05


def _as_priors(priors: Union[PriorSpec, Sequence[PriorSpec]]) -> Tuple[PriorSpec, ...]:
    if isinstance(priors, (list, tuple)):
        return tuple(priors)
    return (priors,)  # type: ignore[return-value]


@dataclass(frozen=True)
class ProblemSpec:
    """Priors and reward noise shared by every problem variant.

    ``priors`` holds one independent prior per arm. With a single arm the
    outside option has known mean zero.
    """

    priors: Tuple[PriorSpec, ...]
    arms: ArmModel = field(default_factory=ArmModel)

    def __post_init__(self) -> None:
        priors = _as_priors(self.priors)
        object.__setattr__(self, "priors", priors)
        self.arms.check_priors(priors)

    @property
    def K(self) -> int:  # noqa: N802
        return self.arms.K

    @property
    def prior(self) -> PriorSpec:
        """The prior of a one-armed problem"""
        if self.K != 1:
            raise IllegalArgumentError("problem has more than one arm")
        return self.priors[0]

    @property
    def sigma(self) -> float:
        return self.arms.sigma[0]


@dataclass(frozen=True)
class FiniteHorizonOptimal(ProblemSpec):
    pass


@dataclass(frozen=True)
class PolicyRisk(ProblemSpec):
    policy: AbstractPolicy = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        super().__post_init__()
        if self.policy is None:
            raise IllegalArgumentError("policy risk needs a policy")


@dataclass(frozen=True)
class Batched(ProblemSpec):
    batch_dt: float = 0.25

    def __post_init__(self) -> None:
        super().__post_init__()
        if not 0 < self.batch_dt <= 1:
            raise IllegalArgumentError("batch_dt must lie in (0, 1]")
        batches = 1.0 / self.batch_dt
        if abs(batches - round(batches)) > _MULTIPLE_TOLERANCE * batches:
            raise IllegalArgumentError(f"batch_dt={self.batch_dt} does not divide 1")

    @property
    def batches(self) -> int:
        return int(round(1.0 / self.batch_dt))

    def steps_per_batch(self, dt: float) -> int:
        steps = self.batch_dt / dt
        if abs(steps - round(steps)) > _MULTIPLE_TOLERANCE * max(steps, 1.0):
            raise IllegalArgumentError(
                f"batch_dt={self.batch_dt} is not a multiple of dt={dt}"
            )
        return int(round(steps))


@dataclass(frozen=True)
class Discounted(ProblemSpec):
    beta: float = 1.0

    def __post_init__(self) -> None:
        super().__post_init__()
        if not (self.beta > 0 and math.isfinite(self.beta)):
            raise IllegalArgumentError(f"discount rate must be positive: {self.beta}")

    def collapse_q(self, ratio: float = POSTERIOR_COLLAPSE) -> float:
        """Smallest q at which every arm's posterior sd is below ``ratio``
        times its prior sd.

        Gaussian updating gives ``(ratio**-2 - 1) * sigma**2 / prior variance``.
        A discrete posterior's sd depends on x, so discrete priors get the
        same bound computed from their variance.
        """
        if not 0 < ratio < 1:
            raise IllegalArgumentError(f"ratio must lie in (0, 1), got {ratio}")
        bound = 0.0
        for prior, sigma in zip(self.priors, self.arms.sigma):
            variance = prior.variance
            if variance > 0:
                bound = max(bound, (ratio**-2 - 1.0) * sigma**2 / variance)
        return bound


@dataclass(frozen=True)
class BestArm(ProblemSpec):
    def __post_init__(self) -> None:
        super().__post_init__()
        if self.K < 2:
            raise IllegalArgumentError("best-arm identification needs K >= 2 arms")
