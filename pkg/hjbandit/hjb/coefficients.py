from __future__ import annotations

import logging
from typing import List, NamedTuple

import numpy as np
import scipy.sparse as sp

from hjbandit.beliefs import multiarm_moments, posterior_moments
from hjbandit.errors import IllegalArgumentError
from hjbandit.lattice import Coefficients, GridSpec, generator_matrix

from .problem import ProblemSpec

log = logging.getLogger(__name__)

__all__ = ["Payoffs", "payoffs"]


class Payoffs(NamedTuple):
    """PDE coefficients of a problem sampled on a grid.

    They depend on (x, q) only, so one evaluation serves every time step.
    """

    means: np.ndarray
    "Posterior mean of each arm per node, shape ``(size, K)``"

    best: np.ndarray
    "mu_plus per node (one arm) or mu_max (several arms), shape ``(size,)``"

    arm_generators: List[sp.csr_matrix]
    "Generator of each arm on the one-arm (x, q) grid"

    @property
    def mean(self) -> np.ndarray:
        return self.means[:, 0]

    def gaps(self) -> np.ndarray:
        """Instantaneous regret of pulling each arm, ``best - means``"""
        return self.best[:, None] - self.means


def payoffs(problem: ProblemSpec, grid: GridSpec, nodes: int = 64) -> Payoffs:
    """Evaluate posterior means, mu_plus / mu_max and the arm generators"""
    if grid.K != problem.K:
        raise IllegalArgumentError(f"grid has {grid.K} arms, problem has {problem.K}")
    x, q = grid.flat_mesh()
    arm_grid = grid.arm_grid()
    ax, aq = arm_grid.flat_mesh()
    generators = []
    for k, prior in enumerate(problem.priors):
        sigma = problem.arms.sigma[k]
        moments = posterior_moments(prior, sigma, ax[:, 0], aq[:, 0])
        generators.append(
            generator_matrix(
                arm_grid, Coefficients(np.asarray(moments.mean), sigma**2)
            )
        )
    if problem.K == 1:
        moments = posterior_moments(problem.prior, problem.sigma, x[:, 0], q[:, 0])
        means = np.asarray(moments.mean, dtype=float)[:, None]
        best = np.asarray(moments.mu_plus, dtype=float)
    else:
        means, best = multiarm_moments(problem.priors, problem.arms, x, q, nodes)
    log.debug(
        "Evaluated payoffs for %d arm(s) on %d nodes", problem.K, grid.size
    )
    return Payoffs(means, best, generators)
