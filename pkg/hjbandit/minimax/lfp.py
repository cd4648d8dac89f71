"""Search for the least-favourable two-point prior.

Each step solves the Bayes problem under the current two-point prior,
profiles the frequentist risk of its optimal policy by simulation, and
moves the prior towards the two risk peaks.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from hjbandit.beliefs import ArmModel, two_point
from hjbandit.errors import IllegalArgumentError, NoNegativePeak, NoPositivePeak
from hjbandit.hjb import FiniteHorizonOptimal, SolverOptions, solve_optimal
from hjbandit.lattice import GridSpec
from hjbandit.policies import AbstractPolicy
from hjbandit.sim import GaussianShift, frequentist_profile
from hjbandit.structs import LfpState, RiskProfile
from hjbandit.util import round_to

log = logging.getLogger(__name__)

__all__ = [
    "MinimaxSettings",
    "Peaks",
    "find_peaks",
    "lfp_iterate",
    "rescale_lfp",
    "solve_under_lfp",
]


@dataclass(frozen=True)
class MinimaxSettings:
    """Budget and update rule of the least-favourable prior search.

    Arguments:
        learning_rates (tuple): step sizes of the low support point, the
            high support point and the mass. Default: (0.1, 0.1, 0.1)
        support_unit (float): support points are rounded to multiples of
            this. Default: 0.05. A unit of 0.5 gives the coarser half-unit
            rounding that reported least-favourable priors use.
        mass_unit (float): the mass is rounded to multiples of this.
            Default: 0.005
        max_iter (int): outer iterations of :func:`search_lfp`. Default: 50
        mu_min (float): left end of the profiled mu grid. Default: -6
        mu_max (float): right end of the profiled mu grid. Default: 6
        mu_step (float): spacing of the profiled mu grid. Default: 0.1
        n (int): horizon of the simulated episodes. Default: 2000
        reps (int): replications per mu. Default: 4000
        seed (int): experiment seed. Default: 0
        preset (str): grid preset of the PDE solves. Default: desk
        solver (SolverOptions): PDE solver options
        workers (int): Monte-Carlo worker threads. Default: None (automatic)
    """

    learning_rates: Tuple[float, float, float] = (0.1, 0.1, 0.1)
    support_unit: float = 0.05
    mass_unit: float = 0.005
    max_iter: int = 50
    mu_min: float = -6.0
    mu_max: float = 6.0
    mu_step: float = 0.1
    n: int = 2000
    reps: int = 4000
    seed: int = 0
    preset: str = "desk"
    solver: SolverOptions = field(default_factory=SolverOptions)
    workers: Optional[int] = None

    def __post_init__(self) -> None:
        if len(self.learning_rates) != 3 or not all(
            r > 0 for r in self.learning_rates
        ):
            raise IllegalArgumentError("three positive learning rates are required")
        if not (self.support_unit > 0 and self.mass_unit > 0):
            raise IllegalArgumentError("rounding units must be positive")
        if self.max_iter < 0:
            raise IllegalArgumentError("max_iter must be nonnegative")
        if not (self.mu_min < 0 < self.mu_max and self.mu_step > 0):
            raise IllegalArgumentError("the mu grid must straddle zero")

    def mu_grid(self) -> List[float]:
        count = int(math.floor((self.mu_max - self.mu_min) / self.mu_step + 1e-9))
        points = self.mu_min + self.mu_step * np.arange(count + 1)
        return [round(float(mu), 10) + 0.0 for mu in points]


class Peaks(NamedTuple):
    mu_l: float
    "Location of the risk peak on the negative side"

    risk_l: float

    mu_r: float
    "Location of the risk peak on the positive side"

    risk_r: float

    @property
    def smaller_risk(self) -> float:
        """``min(R_l, R_r)``, the scale of the mass update

        Raises:
            NoNegativePeak, NoPositivePeak: that side's peak carries no risk
        """
        if not self.risk_l > 0:
            raise NoNegativePeak(f"peak at mu={self.mu_l:g} carries no risk")
        if not self.risk_r > 0:
            raise NoPositivePeak(f"peak at mu={self.mu_r:g} carries no risk")
        return min(self.risk_l, self.risk_r)

    @property
    def gap(self) -> float:
        """Relative imbalance ``|R_l - R_r| / min(R_l, R_r)``"""
        return abs(self.risk_r - self.risk_l) / self.smaller_risk


def _smooth(values: np.ndarray) -> np.ndarray:
    """Three-point moving average, shortened at the ends"""
    padded = np.pad(values, 1)
    counts = np.pad(np.ones_like(values), 1)
    window = np.ones(3)
    sums = np.convolve(padded, window, mode="valid")
    return sums / np.convolve(counts, window, mode="valid")


def find_peaks(profile: RiskProfile) -> Peaks:
    """Largest smoothed risk on each side of zero.

    Ties go to the larger ``|mu|``. A maximum at the end of the grid means
    the profile is monotone on that side and no peak was found.

    Raises:
        NoNegativePeak, NoPositivePeak
    """
    mu = np.asarray(profile.mu_grid, dtype=float)
    order = np.argsort(mu, kind="stable")
    mu = mu[order]
    risk = _smooth(np.asarray(profile.mean_regret, dtype=float)[order])

    negative = np.flatnonzero(mu < 0)
    if negative.size < 2:
        raise NoNegativePeak("profile has fewer than two points below zero")
    # first maximum = most negative among ties
    i_l = negative[int(np.argmax(risk[negative]))]
    if i_l == negative[0]:
        raise NoNegativePeak(f"risk keeps rising towards mu={mu[i_l]:g}")

    positive = np.flatnonzero(mu > 0)
    if positive.size < 2:
        raise NoPositivePeak("profile has fewer than two points above zero")
    flipped = risk[positive][::-1]
    i_r = positive[positive.size - 1 - int(np.argmax(flipped))]
    if i_r == positive[-1]:
        raise NoPositivePeak(f"risk keeps rising towards mu={mu[i_r]:g}")

    return Peaks(float(mu[i_l]), float(risk[i_l]), float(mu[i_r]), float(risk[i_r]))


def rescale_lfp(lfp: LfpState, sigma: float) -> LfpState:
    """Least-favourable prior for reward sd ``sigma`` from the unit-sd one"""
    if not sigma > 0:
        raise IllegalArgumentError(f"sigma must be positive, got {sigma}")
    return lfp._replace(mu_lo=lfp.mu_lo * sigma, mu_hi=lfp.mu_hi * sigma)


def solve_under_lfp(
    state: LfpState, sigma: float, settings: MinimaxSettings
) -> Tuple[float, AbstractPolicy, FiniteHorizonOptimal, GridSpec]:
    """Minimal Bayes risk and optimal policy under a two-point prior"""
    prior = two_point(state.mu_lo, state.mu_hi, state.p)
    problem = FiniteHorizonOptimal(prior, ArmModel.single(sigma))
    grid = GridSpec.from_preset(settings.preset, sigma)
    solution = solve_optimal(problem, grid, settings.solver)
    return solution.value_at_origin, solution.optimal_policy(), problem, grid


def _update(state: LfpState, peaks: Peaks, settings: MinimaxSettings) -> LfpState:
    a1, a2, a3 = settings.learning_rates
    mu_lo = state.mu_lo + a1 * (peaks.mu_l - state.mu_lo) / peaks.mu_l
    mu_hi = state.mu_hi + a2 * (peaks.mu_r - state.mu_hi) / peaks.mu_r
    p = state.p + a3 * (peaks.risk_r - peaks.risk_l) / peaks.smaller_risk
    unit, mass = settings.support_unit, settings.mass_unit
    mu_lo = min(round_to(mu_lo, unit), -unit)
    mu_hi = max(round_to(mu_hi, unit), unit)
    p = min(max(round_to(p, mass), mass), round_to(1.0 - mass, mass))
    return LfpState(mu_lo, mu_hi, p, state.iteration + 1).validate()


def lfp_iterate(
    state: LfpState, settings: MinimaxSettings, sigma: float = 1.0
) -> Tuple[LfpState, Peaks]:
    """One update of the two-point prior.

    Returns the rounded new state and the risk peaks it was derived from.

    Raises:
        NoNegativePeak, NoPositivePeak: the risk profile of the Bayes policy
            has no interior peak on one side of zero
    """
    state.validate()
    value, policy, _, _ = solve_under_lfp(state, sigma, settings)
    profile = frequentist_profile(
        policy,
        settings.mu_grid(),
        GaussianShift(sigma),
        settings.n,
        settings.reps,
        settings.seed,
        workers=settings.workers,
    )
    peaks = find_peaks(profile)
    new = _update(state, peaks, settings)
    log.info(
        "LFP iteration %d: (%.3f, %.3f, %.3f) -> (%.3f, %.3f, %.3f),"
        " V=%.4f, peaks %.2f/%.4f and %.2f/%.4f",
        new.iteration,
        state.mu_lo,
        state.mu_hi,
        state.p,
        new.mu_lo,
        new.mu_hi,
        new.p,
        value,
        peaks.mu_l,
        peaks.risk_l,
        peaks.mu_r,
        peaks.risk_r,
    )
    return new, peaks
