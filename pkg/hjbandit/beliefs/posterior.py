"""Posterior moments of the scaled mean reward.

All functions accept scalars or numpy arrays for ``x`` and ``q`` and
broadcast them; scalar inputs give float outputs. The normal cdf comes from
``scipy.special.ndtr`` (Cephes erf/erfc, relative error below 1e-15 on the
range used here).
"""

from __future__ import annotations

import math
from typing import Tuple, Union

import numpy as np
from scipy import special

from hjbandit.errors import AllWeightsUnderflow, IllegalArgumentError
from hjbandit.structs import PosteriorMoments, ScoreSufficientStat, State

from .priors import DiscretePrior, GaussianPrior, PriorSpec

__all__ = [
    "normal_cdf",
    "normal_pdf",
    "mu_plus",
    "gaussian_posterior",
    "discrete_posterior",
    "posterior_moments",
    "prob_nonnegative",
    "parametric_sufficient_update",
    "approximate_posterior",
]

ArrayLike = Union[float, np.ndarray]

_INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
# exp() of anything below this is zero in double precision
_LOG_UNDERFLOW = -745.0


def normal_cdf(z: ArrayLike) -> ArrayLike:
    return special.ndtr(z)


def normal_pdf(z: ArrayLike) -> ArrayLike:
    return _INV_SQRT_2PI * np.exp(-0.5 * np.square(z))


def _out(value: np.ndarray) -> ArrayLike:
    return float(value) if np.ndim(value) == 0 else value


def mu_plus(mean: ArrayLike, sd: ArrayLike) -> ArrayLike:
    """E[max(mu, 0)] for mu ~ N(mean, sd**2); ``sd == 0`` gives max(mean, 0)"""
    mean = np.asarray(mean, dtype=float)
    sd = np.asarray(sd, dtype=float)
    positive = sd > 0
    safe_sd = np.where(positive, sd, 1.0)
    z = mean / safe_sd
    smooth = mean * special.ndtr(z) + safe_sd * normal_pdf(z)
    # rounding can leave the smooth branch a few ulp under max(mean, 0)
    floor = np.maximum(mean, 0.0)
    return _out(np.where(positive, np.maximum(smooth, floor), floor))


def _gaussian_moments(
    prior: GaussianPrior, sigma: float, x: ArrayLike, q: ArrayLike
) -> PosteriorMoments:
    x = np.asarray(x, dtype=float)
    q = np.asarray(q, dtype=float)
    if np.any(q < 0):
        raise IllegalArgumentError("pull fraction q must be nonnegative")
    precision = q / sigma**2 + 1.0 / prior.variance
    mean = (x / sigma**2 + prior.mean / prior.variance) / precision
    sd = 1.0 / np.sqrt(precision)
    return PosteriorMoments(_out(mean), _out(sd), mu_plus(mean, sd))


def gaussian_posterior(
    prior: GaussianPrior, sigma: float, s: State
) -> PosteriorMoments:
    """Posterior of mu at state ``s`` under a normal prior and reward sd ``sigma``.

    The posterior is N(mean, sd**2) with precision ``q/sigma**2 + 1/nu**2``.
    """
    return _gaussian_moments(prior, sigma, s.x, s.q)


def _discrete_weights(
    prior: DiscretePrior, sigma: float, x: ArrayLike, q: ArrayLike
) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    q = np.asarray(q, dtype=float)
    if np.any(q < 0):
        raise IllegalArgumentError("pull fraction q must be nonnegative")
    shape = np.broadcast(x, q).shape
    if prior.is_degenerate:
        return np.ones((*shape, 1))
    support = prior.support
    with np.errstate(divide="ignore"):
        log_prior = np.log(prior.mass)
    log_w = (
        log_prior
        + (x[..., None] * support) / sigma**2
        - (q[..., None] * support**2) / (2.0 * sigma**2)
    )
    log_w = log_w - np.max(log_w, axis=-1, keepdims=True)
    if np.any(np.all(log_w < _LOG_UNDERFLOW, axis=-1)):
        raise AllWeightsUnderflow("every posterior weight underflowed")
    weights = np.exp(log_w)
    weights /= weights.sum(axis=-1, keepdims=True)
    # q == 0 carries no information, keep the prior bit-for-bit
    no_data = np.broadcast_to(q == 0, shape)
    if np.any(no_data):
        weights[no_data] = prior.mass
    return weights


def discrete_posterior(
    prior: DiscretePrior, sigma: float, s: State
) -> Tuple[np.ndarray, PosteriorMoments]:
    """Posterior weights on the atoms of ``prior`` and the implied moments.

    Weights are ``p_i * exp(mu_i x / sigma**2 - q mu_i**2 / (2 sigma**2))``
    normalised in log space. The last axis of the weights indexes atoms.
    """
    weights = _discrete_weights(prior, sigma, s.x, s.q)
    support = prior.support
    mean = weights @ support
    plus = weights @ np.maximum(support, 0.0)
    return weights, PosteriorMoments(_out(mean), None, _out(plus))


def posterior_moments(
    prior: PriorSpec, sigma: float, x: ArrayLike, q: ArrayLike
) -> PosteriorMoments:
    """Family-independent entry point used by the solvers and policies"""
    if isinstance(prior, GaussianPrior):
        return _gaussian_moments(prior, sigma, x, q)
    _, moments = discrete_posterior(prior, sigma, State(x, q))  # type: ignore[arg-type]
    return moments


def prob_nonnegative(
    prior: PriorSpec, sigma: float, x: ArrayLike, q: ArrayLike
) -> ArrayLike:
    """Posterior probability that mu >= 0"""
    if isinstance(prior, GaussianPrior):
        moments = _gaussian_moments(prior, sigma, x, q)
        return _out(special.ndtr(np.asarray(moments.mean) / np.asarray(moments.sd)))
    weights = _discrete_weights(prior, sigma, x, q)
    return _out(weights @ (prior.support >= 0).astype(float))


def parametric_sufficient_update(
    stat: ScoreSufficientStat, score_value: float, sigma: float, n: int
) -> ScoreSufficientStat:
    """Advance the score process by one pull.

    ``x`` grows by ``sigma**2 * psi(Y) / sqrt(n)`` and ``q`` by ``1/n``.
    """
    return ScoreSufficientStat(
        stat.x + sigma**2 * score_value / math.sqrt(n),
        stat.q + 1.0 / n,
    )


def approximate_posterior(
    prior: PriorSpec, score_sigma: float, stat: ScoreSufficientStat
) -> PosteriorMoments:
    """Posterior of the local parameter h given the score statistic.

    The likelihood of the score process is approximated by N(q h, q
    score_sigma**2), which makes this the normal-rewards posterior with
    ``score_sigma`` in place of the reward sd.
    """
    return posterior_moments(prior, score_sigma, stat.x, stat.q)
