"""Exact backward induction of the ``n``-period one-armed bandit.

The oracle works in the same scaled coordinates as the PDE solvers: after
``c`` pulls the state is ``x = sum(Y) / sqrt(n)``, ``q = c / n``, and one
pull moves ``x`` by ``Y / sqrt(n)`` with ``Y ~ N(mu / sqrt(n), sigma**2)``.
Only ``x`` needs a grid; ``q`` and ``t`` are exact.
"""

from __future__ import annotations

import logging
import math

import numpy as np
from numpy.polynomial.hermite import hermgauss

from hjbandit.beliefs import (
    DiscretePrior,
    GaussianPrior,
    PriorSpec,
    discrete_posterior,
    posterior_moments,
)
from hjbandit.errors import IllegalArgumentError, UnsupportedK
from hjbandit.lattice import GridSpec
from hjbandit.structs import State

log = logging.getLogger(__name__)

__all__ = ["solve_fixed_n"]


def _continuation(
    prior: PriorSpec,
    sigma: float,
    n: int,
    x: np.ndarray,
    q: float,
    nxt: np.ndarray,
    nodes: np.ndarray,
    weights: np.ndarray,
) -> np.ndarray:
    """E[V(x + Y/sqrt(n))] under the predictive law of the next reward"""
    if isinstance(prior, GaussianPrior):
        moments = posterior_moments(prior, sigma, x, q)
        mean = np.asarray(moments.mean) / n
        sd = np.sqrt(sigma**2 / n + np.asarray(moments.sd) ** 2 / n**2)
        sd = np.broadcast_to(sd, x.shape)
        points = x[:, None] + mean[:, None] + sd[:, None] * nodes
        return np.interp(points, x, nxt) @ weights

    atom_weights, _ = discrete_posterior(prior, sigma, State(x, q))
    sd = sigma / math.sqrt(n)
    out = np.zeros_like(x)
    for i, mu in enumerate(prior.support):
        points = x[:, None] + mu / n + sd * nodes
        out += atom_weights[:, i] * (np.interp(points, x, nxt) @ weights)
    return out


def solve_fixed_n(
    prior: PriorSpec,
    sigma: float,
    n: int,
    grid: GridSpec,
    *,
    quadrature_nodes: int = 32,
) -> float:
    """Minimal Bayes risk ``V_n(0, 0, 0)`` of the ``n``-period problem.

    Each period costs ``(mu_plus - a * mu) / n``. The value after period
    ``j`` is kept for every pull count ``c <= j`` on the grid's x nodes and
    read between nodes by linear interpolation (flat outside the grid).

    Arguments:
        prior (PriorSpec): prior on the scaled mean reward
        sigma (float): reward standard deviation
        n (int): number of periods, at least 1
        grid (GridSpec): one-arm grid; only its x nodes are used
        quadrature_nodes (int): Gauss-Hermite nodes of the reward integral.
            Default: 32
    """
    if n < 1:
        raise IllegalArgumentError(f"horizon must be at least 1, got {n}")
    if grid.K != 1:
        raise UnsupportedK("the fixed-n oracle covers one arm")
    if not isinstance(prior, (GaussianPrior, DiscretePrior)):
        raise IllegalArgumentError(f"unsupported prior {prior!r}")
    t_nodes, t_weights = hermgauss(quadrature_nodes)
    nodes = math.sqrt(2.0) * t_nodes
    weights = t_weights / math.sqrt(math.pi)

    x = grid.x_nodes
    # value[c] is V after the current period with c pulls so far
    value = np.zeros((n + 1, grid.nx))
    for period in range(n - 1, -1, -1):
        current = np.zeros((period + 1, grid.nx))
        for c in range(period + 1):
            q = c / n
            moments = posterior_moments(prior, sigma, x, q)
            mean = np.asarray(moments.mean, dtype=float)
            plus = np.asarray(moments.mu_plus, dtype=float)
            stay = plus / n + value[c]
            pull = (plus - mean) / n + _continuation(
                prior, sigma, n, x, q, value[c + 1], nodes, weights
            )
            current[c] = np.minimum(pull, stay)
        value = current
        log.debug("Fixed-n period %d/%d done", period, n)
    result = float(np.interp(0.0, x, value[0]))
    log.info("Fixed-n oracle (n=%d) gives V(0) = %.6g", n, result)
    return result
